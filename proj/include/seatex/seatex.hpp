#ifndef SEATEX_SEATEX_HPP
#define SEATEX_SEATEX_HPP

#include "seatex/clustering.hpp"
#include "seatex/config.hpp"
#include "seatex/features.hpp"
#include "seatex/matrix.hpp"
#include "seatex/pipeline.hpp"
#include "seatex/raster.hpp"
#include "seatex/selection.hpp"
#include "seatex/superpixel.hpp"
#include "seatex/synthetic.hpp"
#include "seatex/validity.hpp"

#endif
