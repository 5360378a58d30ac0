#pragma once

#include "convexlab/energy.hpp"
#include "convexlab/error.hpp"
#include "convexlab/generators.hpp"
#include "convexlab/ordered_set.hpp"
#include "convexlab/search.hpp"
#include "convexlab/spectral.hpp"
#include "convexlab/suite.hpp"
#include "convexlab/verifier.hpp"
#include "convexlab/wide_int.hpp"
