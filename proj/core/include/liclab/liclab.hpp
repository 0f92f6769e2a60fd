#pragma once

#include "liclab/attacks.hpp"
#include "liclab/checkpoint.hpp"
#include "liclab/codec.hpp"
#include "liclab/config.hpp"
#include "liclab/csv.hpp"
#include "liclab/dct_codec.hpp"
#include "liclab/defense.hpp"
#include "liclab/entropy.hpp"
#include "liclab/grad_check.hpp"
#include "liclab/image.hpp"
#include "liclab/metrics.hpp"
#include "liclab/ops.hpp"
#include "liclab/optimizer.hpp"
#include "liclab/rng.hpp"
#include "liclab/tensor.hpp"
