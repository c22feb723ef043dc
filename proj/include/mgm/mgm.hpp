#pragma once

#include "units.hpp"
#include "model.hpp"
#include "spectrum.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "io.hpp"
