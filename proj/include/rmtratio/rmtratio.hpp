/*
   Copyright 2026 The rmtratio Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "rmtratio/analysis.hpp"
#include "rmtratio/eigensolver.hpp"
#include "rmtratio/ensembles.hpp"
#include "rmtratio/error.hpp"
#include "rmtratio/fit.hpp"
#include "rmtratio/io.hpp"
#include "rmtratio/ks.hpp"
#include "rmtratio/models.hpp"
#include "rmtratio/quadrature.hpp"
#include "rmtratio/ratios.hpp"
#include "rmtratio/rng.hpp"
#include "rmtratio/tails.hpp"
