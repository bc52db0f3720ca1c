#pragma once

#include "adspoly/core.hpp"
#include "adspoly/qd.hpp"
#include "adspoly/vortex.hpp"
#include "adspoly/frame.hpp"
#include "adspoly/polygon.hpp"
#include "adspoly/limits.hpp"
#include "adspoly/gauss.hpp"
#include "adspoly/correspondence.hpp"
#include "adspoly/parallel.hpp"

#define ADSPOLY_VERSION "0.1.0"
