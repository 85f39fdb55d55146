#include "disent/io.hpp"

#include <charconv>
#include <fstream>

#include "disent/errors.hpp"

namespace disent {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void append_optional(std::string& row, const std::optional<double>& v) {
    row += ',';
    if (v) row += format_double(*v);
}

}  // namespace

std::string trajectory_csv(const std::vector<ObservableRecord>& records, int modes,
                           const PairList& pairs) {
    std::string out = "time,trace,purity,energy,energy_over_u,total_number,n_up,n_down,q_d_expect,u_e";
    for (int m = 0; m < modes; ++m) out += ",occ_" + std::to_string(m);
    for (const auto& [a, b] : pairs)
        out += ",corr_" + std::to_string(a) + "_" + std::to_string(b);
    out += '\n';

    for (const auto& r : records) {
        std::string row = format_double(r.time);
        row += ',' + format_double(r.trace_value);
        row += ',' + format_double(r.purity);
        row += ',' + format_double(r.energy);
        row += ',' + format_double(r.energy_over_u);
        row += ',' + format_double(r.total_number);
        append_optional(row, r.n_up);
        append_optional(row, r.n_down);
        row += ',' + format_double(r.q_d_expect);
        append_optional(row, r.u_e);
        for (double v : r.mode_occupations) row += ',' + format_double(v);
        for (double v : r.pair_correlations) row += ',' + format_double(v);
        out += row;
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SweepResult& result, int modes) {
    std::string out = "control,energy,energy_over_u,q_d_expect,u_e,purity";
    for (int m = 0; m < modes; ++m) out += ",occ_" + std::to_string(m);
    out += ",off_branch_occupation,residual,converged\n";

    for (const auto& p : result.points) {
        std::string row = format_double(p.control);
        row += ',' + format_double(p.record.energy);
        row += ',' + format_double(p.record.energy_over_u);
        row += ',' + format_double(p.record.q_d_expect);
        append_optional(row, p.record.u_e);
        row += ',' + format_double(p.record.purity);
        for (double v : p.record.mode_occupations) row += ',' + format_double(v);
        row += ',' + format_double(p.off_extremal_occupation);
        row += ',' + format_double(p.residual);
        row += p.converged ? ",true" : ",false";
        out += row;
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace disent
