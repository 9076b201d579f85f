#pragma once

#include "circle_diffeo.hpp"
#include "cutoffs.hpp"
#include "errors.hpp"
#include "fourier_sobolev.hpp"
#include "jets.hpp"
#include "solitons.hpp"
#include "u1_current.hpp"
#include "virasoro.hpp"
