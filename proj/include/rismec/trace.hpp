#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "rismec/channel.hpp"
#include "rismec/errors.hpp"

namespace rismec {

// Channel trace: whitespace-delimited text, hexfloat coefficients for
// bit-exact round trips.
//
//   rismec-trace 1
//   <K> <I> <N_1> ... <N_I>
//   slot <t>
//   <uplink block> <downlink block>
//
// Each block lists re/im pairs: direct coefficients for users 0..K-1, then
// for each RIS the user-side vectors (user-major), then for each RIS the
// AP-side vectors (user-major).

namespace detail {

inline void put_complex(std::ostream& os, Complex c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a %a", c.real(), c.imag());
    os << buf;
}

inline void write_linkset(std::ostream& os, const LinkSet& ls) {
    const std::size_t num_users = ls.direct.size();
    for (std::size_t k = 0; k < num_users; ++k) {
        put_complex(os, ls.direct[k]);
        os << '\n';
    }
    const std::size_t num_riss = num_users ? ls.user_to_ris[0].size() : 0;
    for (const auto* side : {&ls.user_to_ris, &ls.ris_to_ap}) {
        for (std::size_t i = 0; i < num_riss; ++i) {
            for (std::size_t k = 0; k < num_users; ++k) {
                const CVector& v = (*side)[k][i];
                for (Eigen::Index l = 0; l < v.size(); ++l) {
                    put_complex(os, v[l]);
                    os << (l + 1 == v.size() ? '\n' : ' ');
                }
            }
        }
    }
}

class TokenReader {
  public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    std::string next() {
        std::string tok;
        if (!(in_ >> tok)) throw ValidationError("trace: unexpected end of file");
        return tok;
    }
    bool at_end() {
        in_ >> std::ws;
        return in_.peek() == std::char_traits<char>::eof();
    }
    double number() {
        const std::string tok = next();
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ValidationError("trace: malformed numeric token '" + tok + "'");
        return v;
    }
    long integer() {
        const double v = number();
        const long n = static_cast<long>(v);
        if (static_cast<double>(n) != v)
            throw ValidationError("trace: expected an integer");
        return n;
    }
    Complex cplx() {
        const double re = number();
        const double im = number();
        return {re, im};
    }

  private:
    std::istream& in_;
};

inline LinkSet read_linkset(TokenReader& r, std::size_t num_users,
                            const std::vector<int>& ris_sizes) {
    LinkSet ls;
    ls.direct.resize(num_users);
    ls.user_to_ris.assign(num_users, std::vector<CVector>(ris_sizes.size()));
    ls.ris_to_ap.assign(num_users, std::vector<CVector>(ris_sizes.size()));
    for (std::size_t k = 0; k < num_users; ++k) ls.direct[k] = r.cplx();
    for (auto member : {&LinkSet::user_to_ris, &LinkSet::ris_to_ap}) {
        for (std::size_t i = 0; i < ris_sizes.size(); ++i) {
            for (std::size_t k = 0; k < num_users; ++k) {
                CVector v(ris_sizes[i]);
                for (Eigen::Index l = 0; l < v.size(); ++l) v[l] = r.cplx();
                (ls.*member)[k][i] = std::move(v);
            }
        }
    }
    return ls;
}

} // namespace detail

inline void save_channel_trace(std::ostream& os,
                               const std::vector<ChannelRealization>& trace) {
    os << "rismec-trace 1\n";
    if (trace.empty()) {
        os << "0 0\n";
        return;
    }
    const auto& first = trace.front().uplink;
    const std::size_t num_users = first.direct.size();
    const std::size_t num_riss = num_users ? first.user_to_ris[0].size() : 0;
    os << num_users << ' ' << num_riss;
    for (std::size_t i = 0; i < num_riss; ++i) os << ' ' << first.user_to_ris[0][i].size();
    os << '\n';
    for (const auto& real : trace) {
        os << "slot " << real.slot << '\n';
        detail::write_linkset(os, real.uplink);
        detail::write_linkset(os, real.downlink);
    }
}

/// Reads a trace back in slot order. The file is self-describing; dimension
/// checks against a scenario happen in the config-taking overload.
inline std::vector<ChannelRealization> load_channel_trace(std::istream& in) {
    detail::TokenReader r(in);
    if (r.next() != "rismec-trace") throw ValidationError("trace: bad magic");
    if (r.integer() != 1) throw ValidationError("trace: unsupported version");
    const long num_users = r.integer();
    const long num_riss = r.integer();
    if (num_users < 0 || num_riss < 0) throw ValidationError("trace: negative dimension");
    std::vector<int> ris_sizes;
    for (long i = 0; i < num_riss; ++i) {
        const long n = r.integer();
        if (n < 1) throw ValidationError("trace: RIS element count must be >= 1");
        ris_sizes.push_back(static_cast<int>(n));
    }
    std::vector<ChannelRealization> out;
    while (!r.at_end()) {
        if (r.next() != "slot") throw ValidationError("trace: expected 'slot' record");
        ChannelRealization real;
        real.slot = r.integer();
        real.uplink = detail::read_linkset(r, static_cast<std::size_t>(num_users), ris_sizes);
        real.downlink = detail::read_linkset(r, static_cast<std::size_t>(num_users), ris_sizes);
        out.push_back(std::move(real));
    }
    return out;
}

/// Loads and validates dimensions against a scenario.
inline std::vector<ChannelRealization> load_channel_trace(std::istream& in,
                                                          const ScenarioConfig& cfg) {
    auto trace = load_channel_trace(in);
    for (const auto& real : trace) {
        if (real.uplink.direct.size() != cfg.num_users())
            throw ValidationError("trace: user count does not match the scenario");
        const auto& per_user = real.uplink.user_to_ris;
        if (!per_user.empty() && per_user[0].size() != cfg.num_riss())
            throw ValidationError("trace: RIS count does not match the scenario");
        for (std::size_t i = 0; i < cfg.num_riss(); ++i) {
            if (!per_user.empty() &&
                per_user[0][i].size() != cfg.riss[i].num_elements)
                throw ValidationError("trace: RIS element count does not match the scenario");
        }
    }
    return trace;
}

} // namespace rismec
