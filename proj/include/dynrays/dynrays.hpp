#ifndef DYNRAYS_DYNRAYS_HPP
#define DYNRAYS_DYNRAYS_HPP

// Everything except the PNG renderer, which needs zlib at link time.

#include "dynrays/acceptance.hpp"
#include "dynrays/bottcher.hpp"
#include "dynrays/cli_support.hpp"
#include "dynrays/curve.hpp"
#include "dynrays/error.hpp"
#include "dynrays/estimates.hpp"
#include "dynrays/geometry.hpp"
#include "dynrays/growth.hpp"
#include "dynrays/io.hpp"
#include "dynrays/landing.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/rational.hpp"
#include "dynrays/rays.hpp"
#include "dynrays/symbolic.hpp"

#endif  // DYNRAYS_DYNRAYS_HPP
