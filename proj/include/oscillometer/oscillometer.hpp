#pragma once

#include "core.hpp"
#include "cube.hpp"
#include "measure.hpp"
#include "geometry.hpp"
#include "kcoeff.hpp"
#include "covering.hpp"
#include "function.hpp"
#include "family.hpp"
#include "norms.hpp"
#include "io.hpp"
#include "experiments.hpp"
