#ifndef BFTEX_BFTEX_HPP_
#define BFTEX_BFTEX_HPP_

// Umbrella header for the whole library.

#include "classifier.hpp"
#include "descriptors.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "harness.hpp"
#include "imaging.hpp"
#include "parallel.hpp"
#include "preproc_baselines.hpp"
#include "random.hpp"
#include "retina_filter.hpp"
#include "synthetic.hpp"

#endif // BFTEX_BFTEX_HPP_
