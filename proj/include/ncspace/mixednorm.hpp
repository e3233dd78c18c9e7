#pragma once

#include "ncspace/mixednorm/factorization.hpp"
#include "ncspace/mixednorm/jk.hpp"
#include "ncspace/mixednorm/norms.hpp"
#include "ncspace/mixednorm/prox.hpp"
#include "ncspace/mixednorm/vector_element.hpp"
