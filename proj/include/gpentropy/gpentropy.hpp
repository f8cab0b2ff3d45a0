#pragma once

#include "gpentropy/blocktoeplitz.hpp"
#include "gpentropy/error.hpp"
#include "gpentropy/estimate.hpp"
#include "gpentropy/fixtures.hpp"
#include "gpentropy/gaussian.hpp"
#include "gpentropy/matfun.hpp"
#include "gpentropy/process.hpp"
#include "gpentropy/process_json.hpp"
#include "gpentropy/report_json.hpp"
#include "gpentropy/selfcheck.hpp"
#include "gpentropy/summation.hpp"
#include "gpentropy/szego.hpp"
#include "gpentropy/timeseries_io.hpp"
