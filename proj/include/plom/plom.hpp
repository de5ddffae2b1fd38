#pragma once

#include "plom/characterization.hpp"
#include "plom/config.hpp"
#include "plom/core.hpp"
#include "plom/dependence.hpp"
#include "plom/generator.hpp"
#include "plom/marginal.hpp"
#include "plom/numerics.hpp"
#include "plom/rng.hpp"
#include "plom/sampling.hpp"
