#ifndef MORANFRAC_MORANFRAC_HPP
#define MORANFRAC_MORANFRAC_HPP

#include "moranfrac/coding.hpp"
#include "moranfrac/common.hpp"
#include "moranfrac/conditions.hpp"
#include "moranfrac/empirics.hpp"
#include "moranfrac/io.hpp"
#include "moranfrac/pattern.hpp"
#include "moranfrac/rng.hpp"
#include "moranfrac/scales.hpp"
#include "moranfrac/sequence.hpp"
#include "moranfrac/spectrum.hpp"

#endif
