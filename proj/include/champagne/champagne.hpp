/*
   Copyright 2026 The champagne authors

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

// Umbrella header for the whole library.

#pragma once

#include "champagne/bounds.hpp"
#include "champagne/config.hpp"
#include "champagne/io.hpp"
#include "champagne/kernel.hpp"
#include "champagne/numeric.hpp"
#include "champagne/profile.hpp"
#include "champagne/random.hpp"
#include "champagne/sim.hpp"
#include "champagne/spatial_grid.hpp"
#include "champagne/stats.hpp"
