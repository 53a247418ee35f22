#ifndef TABADV_TABADV_HPP
#define TABADV_TABADV_HPP

#include "tabadv/core/error.hpp"
#include "tabadv/core/format.hpp"
#include "tabadv/core/parallel.hpp"
#include "tabadv/core/random.hpp"
#include "tabadv/core/stats.hpp"

#include "tabadv/data/csv.hpp"
#include "tabadv/data/dataset.hpp"
#include "tabadv/data/sampling.hpp"
#include "tabadv/data/schema.hpp"
#include "tabadv/data/synthetic.hpp"

#include "tabadv/constraints/check.hpp"
#include "tabadv/constraints/constraint_set.hpp"
#include "tabadv/constraints/expr.hpp"
#include "tabadv/constraints/parser.hpp"
#include "tabadv/constraints/penalty.hpp"
#include "tabadv/constraints/repair.hpp"
#include "tabadv/constraints/truth.hpp"

#include "tabadv/model/access.hpp"
#include "tabadv/model/auc.hpp"
#include "tabadv/model/mlp.hpp"
#include "tabadv/model/serialize.hpp"
#include "tabadv/model/train.hpp"

#include "tabadv/attacks/capgd.hpp"
#include "tabadv/attacks/cpgd.hpp"
#include "tabadv/attacks/domain.hpp"
#include "tabadv/attacks/geometry.hpp"
#include "tabadv/attacks/moeva.hpp"
#include "tabadv/attacks/nondominated.hpp"

#include "tabadv/eval/audit.hpp"
#include "tabadv/eval/caa.hpp"
#include "tabadv/eval/metrics.hpp"
#include "tabadv/eval/report.hpp"
#include "tabadv/eval/scenario.hpp"

#include "tabadv/cli/commands.hpp"
#include "tabadv/cli/run_config.hpp"

#endif
