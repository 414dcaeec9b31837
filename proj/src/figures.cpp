#include "qcompat/figures.hpp"

#include "qcompat/witness.hpp"

namespace qcompat {

FigureSpec figure_spec(int id, const FamilyParams& params) {
  auto fam = [&](const char* name) { return parse_family(name, params); };
  switch (id) {
    case 1:
      return {1, fam("depolarizing"), fam("depolarizing"), false, "D1 self-pair"};
    case 2:
      return {2, fam("depolarizing-indiv"), fam("depolarizing-indiv"), false, "D2 self-pair"};
    case 3:
      return {3, fam("depolarizing"), fam("depolarizing-indiv"), false, "D1 with D2"};
    case 4:
      return {4, fam("identity"), fam("depolarizing-indiv"), false, "identity with D2"};
    case 5:
      return {5, fam("identity"), fam("amplitude-damping"), false, "identity with amplitude damping"};
    case 6:
      return {6, fam("identity"), fam("eternal"), false, "identity with the eternal map"};
    case 7:
      return {7, fam("identity"), fam("depolarizing-indiv"), true, "identity with D2, teleportation fidelity"};
  }
  throw DomainError("figure id must be between 1 and " + std::to_string(kFigureCount));
}

std::vector<SweepRecord> run_figure(const FigureSpec& fig, const std::vector<double>& t_grid, const SweepOptions& opts) {
  auto records = sweep(fig.map1, fig.map2, t_grid, opts);
  if (fig.teleport_columns)
    for (auto& rec : records) {
      const auto tf = teleport_fidelity(fig.map2, rec.t);
      rec.extras = {{"n_value", tf.n_value}, {"f_max", tf.f_max}};
    }
  return records;
}

}  // namespace qcompat
