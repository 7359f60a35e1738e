#include "vrpts/attrcalc.hpp"

#include <sstream>

#include "vrpts/errors.hpp"

namespace vrpts {

AttrMatrix::AttrMatrix(const Instance& inst, std::span<const int> route)
    : n_(static_cast<int>(route.size())),
      time_windowed_(inst.has_time_windows() || !inst.symmetric()),
      cells_(static_cast<std::size_t>(n_) * n_) {
    for (int k = 0; k < n_; ++k) {
        auto* row = &cells_[static_cast<std::size_t>(k) * n_];
        row[k] = k == 0 ? departure(inst) : singleton(inst, route[k]);
        for (int l = k + 1; l < n_; ++l) row[l] = concat(inst, row[l - 1], singleton(inst, route[l]));
    }
}

AttrMatrix build_attr_matrix(const Instance& inst, std::span<const int> route) { return AttrMatrix(inst, route); }

SubseqAttr reversed_view(const AttrMatrix& m, int k, int l) {
    if (m.time_windowed()) throw ContractError("segment reversal needs a symmetric instance without time windows");
    return swap_ends(m.at(k, l));
}

std::string AttrMatrix::to_csv() const {
    std::ostringstream out;
    out << "k,l,dist,load_in,load_out,load_max,duration,earliest,latest,warp,first,last\n";
    for (int k = 0; k < n_; ++k)
        for (int l = k; l < n_; ++l) {
            const auto& a = at(k, l);
            out << k << "," << l << "," << format_number(a.dist) << "," << format_number(a.load_in) << ","
                << format_number(a.load_out) << "," << format_number(a.load_max) << "," << format_number(a.duration)
                << "," << format_number(a.earliest) << "," << format_number(a.latest) << "," << format_number(a.warp)
                << "," << a.first << "," << a.last << "\n";
        }
    return out.str();
}

}  // namespace vrpts
