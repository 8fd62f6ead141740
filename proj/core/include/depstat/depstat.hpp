#pragma once

#include "depstat/data.hpp"
#include "depstat/dcov.hpp"
#include "depstat/ecdf.hpp"
#include "depstat/json_writer.hpp"
#include "depstat/matrix.hpp"
#include "depstat/mc.hpp"
#include "depstat/numerics.hpp"
#include "depstat/parallel.hpp"
#include "depstat/resampling.hpp"
#include "depstat/rng.hpp"
#include "depstat/serial.hpp"
