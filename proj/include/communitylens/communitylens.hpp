#pragma once

#include "communitylens/common.hpp"
#include "communitylens/parallel.hpp"
#include "communitylens/corpus.hpp"
#include "communitylens/io.hpp"
#include "communitylens/cohorts.hpp"
#include "communitylens/indicators.hpp"
#include "communitylens/classify.hpp"
#include "communitylens/overlay.hpp"
#include "communitylens/compare.hpp"
#include "communitylens/synthgen.hpp"
