#include "ecsim/locc.hpp"

namespace ecsim::locc {

namespace {

nlohmann::json round_json(const Round& r) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.synthesis.blocks) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : b.mcx) gates.push_back(g.touched);
    blocks.push_back({{"data_index", b.data_index}, {"mcx", gates}});
  }
  std::vector<int> support(r.povm.support.begin(), r.povm.support.end());
  return {
      {"party", r.party == qmath::Party::alice ? "alice" : "bob"},
      {"outcomes", r.povm.outcome_count()},
      {"aux_count", r.unitary.aux_count},
      {"mcx_count", r.synthesis.mcx_count()},
      {"exact", r.synthesis.exact},
      {"current", r.current},
      {"target", r.target},
      {"weights", r.povm.weights},
      {"elements", r.povm.elements},
      {"corrections", r.povm.corrections},
      {"support", support},
      {"blocks", blocks},
  };
}

}  // namespace

nlohmann::json to_json(const ProtocolSchedule& s) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : s.rounds) rounds.push_back(round_json(r));
  nlohmann::json filter{{"trivial", s.filter.trivial}, {"diagonal", s.filter.diagonal}};
  if (!s.filter.trivial) filter["dilation"] = round_json(s.filter.dilation);
  return {
      {"alice_data", s.alice_data},
      {"bob_data", s.bob_data},
      {"initial", s.initial.values()},
      {"intermediate", s.intermediate.values()},
      {"target", s.target.values()},
      {"success_probability", s.success_probability},
      {"ttransform_count", s.ttransform_count},
      {"ttransforms_per_round", s.ttransforms_per_round},
      {"total_mcx", s.total_mcx()},
      {"max_aux_count", s.max_aux_count()},
      {"rounds", rounds},
      {"filter", filter},
  };
}

}  // namespace ecsim::locc
