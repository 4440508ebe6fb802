// Copyright 2026 The Q2Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef Q2Q_NUMERICS_HPP_
#define Q2Q_NUMERICS_HPP_

#include "q2q/numerics/adam.hpp"
#include "q2q/numerics/conv.hpp"
#include "q2q/numerics/gradcheck.hpp"
#include "q2q/numerics/ops.hpp"
#include "q2q/numerics/parameter.hpp"
#include "q2q/numerics/random.hpp"
#include "q2q/numerics/tensor.hpp"

#endif  // Q2Q_NUMERICS_HPP_
