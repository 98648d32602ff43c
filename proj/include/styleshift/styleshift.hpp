#pragma once

#include "styleshift/error.hpp"
#include "styleshift/tensor.hpp"
#include "styleshift/tensor_file.hpp"
#include "styleshift/image_io.hpp"
#include "styleshift/fft.hpp"
#include "styleshift/spectral.hpp"
#include "styleshift/style_ops.hpp"
#include "styleshift/rng.hpp"
#include "styleshift/corpus.hpp"
#include "styleshift/style_bank.hpp"
#include "styleshift/plan.hpp"
#include "styleshift/execute.hpp"
#include "styleshift/metrics.hpp"
