// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wdio/approx.hpp"
#include "wdio/certificates.hpp"
#include "wdio/config.hpp"
#include "wdio/covolume.hpp"
#include "wdio/dynamics.hpp"
#include "wdio/parse.hpp"
#include "wdio/polynomial.hpp"
#include "wdio/quasi_norm.hpp"
#include "wdio/report.hpp"
#include "wdio/structure.hpp"
