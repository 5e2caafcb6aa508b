#pragma once

#include "geosep/error.hpp"
#include "geosep/image.hpp"
#include "geosep/fft.hpp"
#include "geosep/parallel.hpp"
#include "geosep/image_io.hpp"
#include "geosep/wavelets.hpp"
#include "geosep/shearlets.hpp"
#include "geosep/subband.hpp"
#include "geosep/separation.hpp"
#include "geosep/synth.hpp"
#include "geosep/eval.hpp"
#include "geosep/plot.hpp"
#include "geosep/config.hpp"
