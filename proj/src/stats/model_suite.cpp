#include "emi/stats/model_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "emi/errors.hpp"

namespace emi::stats {

InteractionPolicy parse_interaction_policy(std::string_view text) {
    if (text == "vif") return InteractionPolicy::VifRule;
    if (text == "always") return InteractionPolicy::Always;
    if (text == "never") return InteractionPolicy::Never;
    throw std::invalid_argument(fmt::format("unknown interaction policy '{}' (vif, always, never)", text));
}

std::string_view to_string(InteractionPolicy policy) {
    switch (policy) {
    case InteractionPolicy::VifRule: return "vif";
    case InteractionPolicy::Always: return "always";
    case InteractionPolicy::Never: return "never";
    }
    return "?";
}

const std::vector<std::string>& suite_families() {
    static const std::vector<std::string> families{"emi_pol",          "inequality",          "inequality_gini",
                                                   "inequality_1912",  "inequality_pol_lag8", "productivity_mood",
                                                   "productivity_patents"};
    return families;
}

namespace {

struct Candidate {
    RegressionSpec base;  // without the EMI block (may be absent)
    bool has_base = true;
    RegressionSpec full;  // EMI block, interaction not yet added
    std::optional<Interaction> interaction;
};

RegressionSpec make(std::string family, const std::string& dep, std::string_view kind, std::vector<Term> terms) {
    RegressionSpec s;
    s.name = fmt::format("{}/{}/{}", family, dep, kind);
    s.dependent = {dep, 0};
    s.terms = std::move(terms);
    return s;
}

std::vector<std::string> required_columns(std::string_view family, const TimeSeriesTable& table) {
    if (family == "emi_pol") return {"EMI", "Pol"};
    if (family == "inequality" || family == "inequality_pol_lag8") return {"Ineq", "EMI", "Pol"};
    if (family == "inequality_gini") return {"Gini", "EMI", "Pol"};
    if (family == "inequality_1912") return {"Ineq1912", "EMI", "Pol"};
    const std::string covariate = family == "productivity_mood" ? "Mood" : "npatents";
    std::vector<std::string> cols{"EMI", "Pol", covariate, "PartyControl", "PartyControlDif"};
    if (!table.has_column("MLI") && !table.has_column("LPI") && !table.has_column("nlaw")) cols.emplace_back("MLI");
    return cols;
}

std::vector<Candidate> candidates(const std::string& family, const TimeSeriesTable& table) {
    std::vector<Candidate> out;
    if (family == "emi_pol") {
        for (auto [y, x] : {std::pair{"EMI", "Pol"}, std::pair{"Pol", "EMI"}}) {
            Candidate c;
            c.base = make(family, y, "base", {{y, 1}});
            c.full = make(family, y, "full", {{y, 1}, {x, 1}});
            out.push_back(std::move(c));
        }
    } else if (family == "inequality") {
        Candidate c;
        c.base = make(family, "Ineq", "base", {{"Ineq", 1}, {"Pol", 1}});
        c.full = make(family, "Ineq", "full", {{"Ineq", 1}, {"Pol", 1}, {"EMI", 1}});
        c.interaction = Interaction{{"EMI", 1}, {"Pol", 1}};
        out.push_back(std::move(c));
    } else if (family == "inequality_gini" || family == "inequality_1912") {
        const std::string y = family == "inequality_gini" ? "Gini" : "Ineq1912";
        Candidate c;
        c.has_base = false;
        c.full = make(family, y, "full", {{y, 1}, {"EMI", 1}, {"Pol", 1}});
        c.interaction = Interaction{{"EMI", 1}, {"Pol", 1}};
        out.push_back(std::move(c));
    } else if (family == "inequality_pol_lag8") {
        Candidate c;
        c.has_base = false;
        c.full = make(family, "Ineq", "full", {{"Ineq", 1}, {"EMI", 1}, {"Pol", 8}});
        c.interaction = Interaction{{"EMI", 1}, {"Pol", 8}};
        out.push_back(std::move(c));
    } else {
        const std::string covariate = family == "productivity_mood" ? "Mood" : "npatents";
        for (const char* y : {"MLI", "LPI", "nlaw"}) {
            if (!table.has_column(y)) continue;
            std::vector<Term> terms{{y, 1}, {"Pol", 0}, {covariate, 0}, {"PartyControl", 0}, {"PartyControlDif", 0}};
            Candidate c;
            c.base = make(family, y, "base", terms);
            terms.push_back({"EMI", 0});
            c.full = make(family, y, "full", std::move(terms));
            c.interaction = Interaction{{"EMI", 0}, {"Pol", 0}};
            out.push_back(std::move(c));
        }
    }
    return out;
}

void apply_interaction_rule(SuiteModel& m, const Interaction& interaction, const TimeSeriesTable& table,
                            InteractionPolicy policy, const SuiteOptions& opts) {
    m.interaction_candidate = true;
    m.max_vif = std::numeric_limits<double>::quiet_NaN();
    try {
        const auto d = build_design(m.spec, table);
        std::vector<std::string> names;
        std::vector<Eigen::Index> keep;
        const std::string lagged_dep = Term{m.spec.dependent.column, 1}.label();
        for (std::size_t j = 0; j < d.labels.size(); ++j) {
            if (d.labels[j] == "Intercept" || d.labels[j] == lagged_dep) continue;
            names.push_back(d.labels[j]);
            keep.push_back(static_cast<Eigen::Index>(j));
        }
        Eigen::MatrixXd cols(d.X.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = d.X.col(keep[c]);
        m.vif = vif(cols, names);
        m.max_vif = max_vif(m.vif);
    } catch (const DataError& e) {
        m.warnings.push_back(fmt::format("VIF not computed: {}", e.what()));
    }

    switch (policy) {
    case InteractionPolicy::Always: m.interaction_fired = true; break;
    case InteractionPolicy::Never: m.interaction_fired = false; break;
    case InteractionPolicy::VifRule:
        m.interaction_fired = m.max_vif > opts.vif_threshold;
        if (!m.interaction_fired && m.max_vif > opts.warn_floor)
            m.warnings.push_back(fmt::format("max VIF {:.3f} is just below the interaction threshold {}", m.max_vif,
                                             opts.vif_threshold));
        break;
    }
    if (m.interaction_fired) m.spec.interactions.push_back(interaction);
}

}  // namespace

std::vector<SuiteModel> build_model_suite(const TimeSeriesTable& table, const SuiteOptions& opts) {
    const auto& known = suite_families();
    std::vector<std::string> families;
    if (opts.families.empty()) {
        for (const auto& f : known) {
            const auto cols = required_columns(f, table);
            if (std::all_of(cols.begin(), cols.end(), [&](const auto& c) { return table.has_column(c); }))
                families.push_back(f);
        }
    } else {
        for (const auto& f : opts.families) {
            if (std::find(known.begin(), known.end(), f) == known.end())
                throw std::invalid_argument(fmt::format("unknown model family '{}'", f));
            for (const auto& c : required_columns(f, table))
                if (!table.has_column(c)) throw MissingColumnError(c);
            families.push_back(f);
        }
    }

    std::vector<SuiteModel> out;
    for (const auto& family : families) {
        auto it = opts.overrides.find(family);
        const InteractionPolicy policy = it == opts.overrides.end() ? opts.policy : it->second;
        for (auto& c : candidates(family, table)) {
            if (c.has_base) {
                SuiteModel base;
                base.family = family;
                base.spec = std::move(c.base);
                base.max_vif = std::numeric_limits<double>::quiet_NaN();
                out.push_back(std::move(base));
            }
            SuiteModel full;
            full.family = family;
            full.spec = std::move(c.full);
            full.max_vif = std::numeric_limits<double>::quiet_NaN();
            if (c.interaction) apply_interaction_rule(full, *c.interaction, table, policy, opts);
            out.push_back(std::move(full));
        }
    }
    return out;
}

}  // namespace emi::stats
