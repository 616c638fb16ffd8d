#pragma once

// Umbrella header. Users should generally include only this file.

#include "shtuka/util.hpp"
#include "shtuka/fields.hpp"
#include "shtuka/rings.hpp"
#include "shtuka/laurent.hpp"
#include "shtuka/root_datum.hpp"
#include "shtuka/affine_weyl.hpp"
#include "shtuka/newton.hpp"
#include "shtuka/series_matrix.hpp"
#include "shtuka/lattice.hpp"
