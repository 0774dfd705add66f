#pragma once

#include "lapwm/dct4.hpp"
#include "lapwm/error_analysis.hpp"
#include "lapwm/errors.hpp"
#include "lapwm/frame.hpp"
#include "lapwm/laplace_model.hpp"
#include "lapwm/random.hpp"
#include "lapwm/simulation.hpp"
#include "lapwm/video_pipeline.hpp"
#include "lapwm/watermark_codec.hpp"
