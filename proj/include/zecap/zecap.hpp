#pragma once

#include "zecap/bellman.hpp"
#include "zecap/channel.hpp"
#include "zecap/channel_io.hpp"
#include "zecap/code_oracle.hpp"
#include "zecap/corpus.hpp"
#include "zecap/errors.hpp"
#include "zecap/grid_oracle.hpp"
#include "zecap/inner.hpp"
#include "zecap/positivity.hpp"
#include "zecap/simplex.hpp"
#include "zecap/value_iteration.hpp"
