#pragma once

#include "ncspace/cbnorm.hpp"
#include "ncspace/embed.hpp"
#include "ncspace/errors.hpp"
#include "ncspace/exponent.hpp"
#include "ncspace/matcore.hpp"
#include "ncspace/mixednorm.hpp"
#include "ncspace/ncmat_io.hpp"
#include "ncspace/random.hpp"
#include "ncspace/steinhaus.hpp"
