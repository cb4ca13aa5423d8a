#pragma once

// Convenience include for the whole library.

#include "core.hpp"
#include "special.hpp"
#include "series.hpp"
#include "oracle.hpp"
#include "perturbation.hpp"
#include "config.hpp"
#include "sweep.hpp"
#include "emit.hpp"
