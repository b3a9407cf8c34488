#pragma once

#include <map>
#include <string>
#include <vector>

#include "emi/stats/diagnostics.hpp"
#include "emi/stats/regression.hpp"
#include "emi/stats/table.hpp"

namespace emi::stats {

// How the EMI x polarization interaction enters the full model of a family.
enum class InteractionPolicy { VifRule, Always, Never };
InteractionPolicy parse_interaction_policy(std::string_view text);  // "vif", "always", "never"
std::string_view to_string(InteractionPolicy policy);

struct SuiteOptions {
    InteractionPolicy policy = InteractionPolicy::VifRule;
    std::map<std::string, InteractionPolicy, std::less<>> overrides;  // per family
    double vif_threshold = 10.0;  // strict: fires when max VIF > threshold
    double warn_floor = 9.0;      // warn when warn_floor < max VIF <= threshold
    std::vector<std::string> families;  // empty: every family whose columns exist
};

struct SuiteModel {
    std::string family;
    RegressionSpec spec;  // spec.name is "<family>/<dependent>/<base|full>"
    bool interaction_candidate = false;
    bool interaction_fired = false;
    double max_vif = 0;  // over the non-interaction regressors except the lagged dependent; NaN if not computed
    std::vector<VifEntry> vif;
    std::vector<std::string> warnings;
};

// Families, in emission order:
//   emi_pol              EMI ~ EMI(t-1) [+ Pol(t-1)];  Pol ~ Pol(t-1) [+ EMI(t-1)]
//   inequality           Ineq ~ Ineq(t-1) + Pol(t-1) [+ EMI(t-1) (+ EMI(t-1)*Pol(t-1))]
//   inequality_gini      Gini ~ Gini(t-1) + EMI(t-1) + Pol(t-1) (+ interaction)
//   inequality_1912      Ineq1912 ~ Ineq1912(t-1) + EMI(t-1) + Pol(t-1) (+ interaction)
//   inequality_pol_lag8  Ineq ~ Ineq(t-1) + EMI(t-1) + Pol(t-8) (+ EMI(t-1)*Pol(t-8))
//   productivity_mood    Y ~ Y(t-1) + Pol(t) + Mood(t) + PartyControl(t) + PartyControlDif(t)
//                            [+ EMI(t) (+ EMI(t)*Pol(t))]  for Y in MLI, LPI, nlaw
//   productivity_patents as above with npatents in place of Mood
const std::vector<std::string>& suite_families();

// Throws MissingColumnError for an explicitly requested family whose columns
// are absent, std::invalid_argument for an unknown family.
std::vector<SuiteModel> build_model_suite(const TimeSeriesTable& table, const SuiteOptions& opts = {});

}  // namespace emi::stats
