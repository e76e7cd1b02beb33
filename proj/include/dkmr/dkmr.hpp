#pragma once

// Umbrella header: kill-matrix refinement via frequency-domain denoising,
// fuzzy mutation-based fault localization, effectiveness metrics, and the
// synthetic scenario generator.

#include "dkmr/dataset.hpp"
#include "dkmr/denoise.hpp"
#include "dkmr/enhance.hpp"
#include "dkmr/error.hpp"
#include "dkmr/fourier.hpp"
#include "dkmr/matrix.hpp"
#include "dkmr/metrics.hpp"
#include "dkmr/pipeline.hpp"
#include "dkmr/suspicion.hpp"
#include "dkmr/synth.hpp"
