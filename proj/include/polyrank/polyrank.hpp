#pragma once

// Umbrella header: synthesis of polynomial ranking supermartingales for
// nondeterministic probabilistic programs, with exact certificates,
// termination-time bounds and concentration bounds.

#include "polyrank/analysis.hpp"
#include "polyrank/bounds.hpp"
#include "polyrank/certificate.hpp"
#include "polyrank/cfg.hpp"
#include "polyrank/distribution.hpp"
#include "polyrank/gridcheck.hpp"
#include "polyrank/handelman.hpp"
#include "polyrank/lp.hpp"
#include "polyrank/monoid.hpp"
#include "polyrank/monomial.hpp"
#include "polyrank/parser.hpp"
#include "polyrank/pattern.hpp"
#include "polyrank/polynomial.hpp"
#include "polyrank/predicate.hpp"
#include "polyrank/preexpectation.hpp"
#include "polyrank/program.hpp"
#include "polyrank/ranking_template.hpp"
#include "polyrank/rational.hpp"
#include "polyrank/rng.hpp"
#include "polyrank/sdp.hpp"
#include "polyrank/simulate.hpp"
#include "polyrank/sos.hpp"
#include "polyrank/symbolic.hpp"
#include "polyrank/synthesis.hpp"
