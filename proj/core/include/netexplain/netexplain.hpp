#pragma once

#include "netexplain/artifacts.hpp"
#include "netexplain/binary_feature.hpp"
#include "netexplain/class_model.hpp"
#include "netexplain/dataset.hpp"
#include "netexplain/errors.hpp"
#include "netexplain/explain.hpp"
#include "netexplain/feature_stats.hpp"
#include "netexplain/lexicon.hpp"
#include "netexplain/manifest.hpp"
#include "netexplain/npy.hpp"
#include "netexplain/report.hpp"
#include "netexplain/tensor.hpp"
