#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "qecw/errors.hpp"
#include "qecw/ir.hpp"
#include "qecw/rng.hpp"
#include "qecw/trials.hpp"
#include "qecw/validate.hpp"

namespace qecw {

using json = nlohmann::ordered_json;

inline constexpr int kProgramFormatVersion = 1;

namespace detail {

[[noreturn]] inline void syntax_error(const std::string& path, const std::string& what) {
    throw SyntaxError(path + ": " + what);
}

inline const json& need(const json& o, const char* key, const std::string& path) {
    if (!o.is_object()) syntax_error(path, "expected an object");
    auto it = o.find(key);
    if (it == o.end()) syntax_error(path, std::string("missing field '") + key + "'");
    return *it;
}

inline std::string need_string(const json& o, const char* key, const std::string& path) {
    const json& v = need(o, key, path);
    if (!v.is_string()) syntax_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline bool need_bool(const json& o, const char* key, const std::string& path) {
    const json& v = need(o, key, path);
    if (!v.is_boolean()) syntax_error(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

inline double need_number(const json& o, const char* key, const std::string& path) {
    const json& v = need(o, key, path);
    if (!v.is_number()) syntax_error(path + "." + key, "expected a number");
    return v.get<double>();
}

inline Name need_name(const json& o, const char* key, const std::string& path) {
    Name n = need_string(o, key, path);
    if (!valid_name(n)) syntax_error(path + "." + key, "'" + n + "' is not a valid identifier");
    return n;
}

Unitary parse_gates(const json& arr, const std::string& path);

inline GateStep parse_gate(const json& g, const std::string& path) {
    const std::string kind = need_string(g, "gate", path);
    if (kind == "rot") {
        const json& m = need(g, "matrix", path);
        if (!m.is_array() || m.size() != 4) syntax_error(path + ".matrix", "expected 4 [re,im] pairs");
        Amplitude e[4];
        for (std::size_t i = 0; i < 4; ++i) {
            const json& c = m[i];
            if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
                syntax_error(path + ".matrix", "entries must be [re,im] pairs");
            e[i] = Amplitude(c[0].get<double>(), c[1].get<double>());
        }
        try {
            return g_rot(need_name(g, "target", path), Rotation(e[0], e[1], e[2], e[3]));
        } catch (const NotUnitary& err) {
            syntax_error(path + ".matrix", err.what());
        }
    }
    if (kind == "x") return g_rot(need_name(g, "target", path), rot_x());
    if (kind == "h") return g_rot(need_name(g, "target", path), rot_h());
    if (kind == "z") return g_rot(need_name(g, "target", path), rot_z());
    if (kind == "s") return g_rot(need_name(g, "target", path), rot_s());
    if (kind == "phase")
        return g_rot(need_name(g, "target", path), rot_phase(need_number(g, "theta", path)));
    if (kind == "swap") return g_swap(need_name(g, "a", path), need_name(g, "b", path));
    if (kind == "cond")
        return g_cond(need_name(g, "control", path),
                      parse_gates(need(g, "else", path), path + ".else"),
                      parse_gates(need(g, "then", path), path + ".then"));
    if (kind == "ulet")
        return g_ulet(need_bool(g, "init", path), need_name(g, "name", path),
                      parse_gates(need(g, "body", path), path + ".body"));
    syntax_error(path, "unknown gate '" + kind + "'");
}

inline Unitary parse_gates(const json& arr, const std::string& path) {
    if (!arr.is_array()) syntax_error(path, "expected an array of gates");
    Unitary u;
    for (std::size_t i = 0; i < arr.size(); ++i)
        u.append(parse_gate(arr[i], path + "[" + std::to_string(i) + "]"));
    return u;
}

inline json dump_complex(Amplitude a) { return json::array({a.real(), a.imag()}); }

json dump_gates(const Unitary& u);

inline json dump_gate(const GateStep& s) {
    json g;
    if (const auto* r = std::get_if<RotStep>(&s.op)) {
        if (!r->target.is_name())
            throw Error("cannot serialize a program holding raw qubit ids");
        switch (r->rotation.tag()) {
        case Rotation::Tag::pauli_x: g["gate"] = "x"; break;
        case Rotation::Tag::hadamard: g["gate"] = "h"; break;
        case Rotation::Tag::pauli_z: g["gate"] = "z"; break;
        case Rotation::Tag::s_gate: g["gate"] = "s"; break;
        case Rotation::Tag::phase: {
            // Keep the sugar form only when the stored matrix is exactly
            // what the loader will rebuild from theta; otherwise fall back
            // to the raw matrix so round trips stay bit-identical.
            const Rotation rebuilt = rot_phase(r->rotation.theta());
            g["gate"] = (r->rotation == rebuilt) ? "phase" : "rot";
            break;
        }
        default:
            g["gate"] = "rot";
            break;
        }
        g["target"] = r->target.name();
        if (r->rotation.tag() == Rotation::Tag::phase) g["theta"] = r->rotation.theta();
        if (g["gate"] == "rot")
            g["matrix"] = json::array({dump_complex(r->rotation.m00()), dump_complex(r->rotation.m01()),
                                       dump_complex(r->rotation.m10()), dump_complex(r->rotation.m11())});
        return g;
    }
    if (const auto* w = std::get_if<SwapStep>(&s.op)) {
        g["gate"] = "swap";
        g["a"] = w->a.name();
        g["b"] = w->b.name();
        return g;
    }
    if (const auto* c = std::get_if<CondStep>(&s.op)) {
        g["gate"] = "cond";
        g["control"] = c->control.name();
        g["else"] = dump_gates(c->when_false);
        g["then"] = dump_gates(c->when_true);
        return g;
    }
    const auto& l = std::get<UletStep>(s.op);
    g["gate"] = "ulet";
    g["init"] = l.init;
    g["name"] = l.binder;
    g["body"] = dump_gates(l.body);
    return g;
}

inline json dump_gates(const Unitary& u) {
    json arr = json::array();
    for (const GateStep& s : u.steps) arr.push_back(dump_gate(s));
    return arr;
}

inline std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

} // namespace detail

/// Parses the documented program format; the result always passes
/// validation. Errors carry the JSON path (and line, for syntax errors).
inline QProgram parse_program(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError("line " + std::to_string(detail::line_of_offset(text, e.byte)) + ": " +
                          e.what());
    }
    const json& version = detail::need(doc, "version", "document");
    if (!version.is_number_integer() || version.get<int>() != kProgramFormatVersion)
        throw UnsupportedVersion("unsupported program format version " + version.dump());

    const json& stmts = detail::need(doc, "statements", "document");
    if (!stmts.is_array()) detail::syntax_error("statements", "expected an array");

    QProgram p;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        const std::string path = "statements[" + std::to_string(i) + "]";
        const json& s = stmts[i];
        const std::string op = detail::need_string(s, "op", path);
        if (op == "mkqbit") {
            p.stmts.push_back(
                MkQbitStmt{detail::need_bool(s, "init", path), detail::need_name(s, "name", path)});
        } else if (op == "apply") {
            p.stmts.push_back(
                ApplyStmt{detail::parse_gates(detail::need(s, "gates", path), path + ".gates")});
        } else if (op == "measure") {
            p.stmts.push_back(MeasureStmt(QubitRef(detail::need_name(s, "qubit", path)),
                                          detail::need_name(s, "name", path)));
        } else if (op == "return") {
            const json& names = detail::need(s, "names", path);
            if (!names.is_array()) detail::syntax_error(path + ".names", "expected an array");
            ReturnStmt rt;
            for (const json& n : names) {
                if (!n.is_string()) detail::syntax_error(path + ".names", "expected strings");
                rt.names.push_back(n.get<std::string>());
            }
            p.stmts.push_back(std::move(rt));
        } else if (op == "release") {
            std::optional<bool> expect;
            if (s.contains("expect")) expect = detail::need_bool(s, "expect", path);
            p.stmts.push_back(ReleaseStmt(QubitRef(detail::need_name(s, "qubit", path)), expect));
        } else if (op == "noise_site") {
            p.stmts.push_back(NoiseSiteStmt{});
        } else {
            detail::syntax_error(path, "unknown op '" + op + "'");
        }
    }

    require_valid(p);
    return p;
}

inline json program_to_json(const QProgram& p) {
    json doc;
    doc["version"] = kProgramFormatVersion;
    json arr = json::array();
    for (const Statement& stmt : p.stmts) {
        json s;
        if (const auto* mk = std::get_if<MkQbitStmt>(&stmt)) {
            s["op"] = "mkqbit";
            s["name"] = mk->binder;
            s["init"] = mk->init;
        } else if (const auto* ap = std::get_if<ApplyStmt>(&stmt)) {
            s["op"] = "apply";
            s["gates"] = detail::dump_gates(ap->u);
        } else if (const auto* ms = std::get_if<MeasureStmt>(&stmt)) {
            s["op"] = "measure";
            s["qubit"] = ms->target.name();
            s["name"] = ms->binder;
        } else if (const auto* rt = std::get_if<ReturnStmt>(&stmt)) {
            s["op"] = "return";
            s["names"] = rt->names;
        } else if (const auto* rl = std::get_if<ReleaseStmt>(&stmt)) {
            s["op"] = "release";
            s["qubit"] = rl->target.name();
            if (rl->expect) s["expect"] = *rl->expect;
        } else {
            s["op"] = "noise_site";
        }
        arr.push_back(std::move(s));
    }
    doc["statements"] = std::move(arr);
    return doc;
}

inline std::string serialize_program(const QProgram& p) { return program_to_json(p).dump(2) + "\n"; }

/// Rounds to 12 significant digits so report payloads are byte-stable.
inline double round_sig12(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline json distribution_to_json(const OutcomeDistribution& d) {
    json out;
    for (const auto& [k, v] : d.entries) out[result_key(k)] = round_sig12(v);
    return out;
}

inline json tally_to_json(const std::map<ResultValue, std::uint64_t>& tally) {
    json out = json::object();
    for (const auto& [k, v] : tally) out[result_key(k)] = v;
    return out;
}

inline json report_to_json(const TrialReport& r) {
    json out;
    out["code"] = r.code;
    out["channel"] = channel_string(r.channel);
    out["p"] = round_sig12(r.p);
    out["location"] = location_string(r.location);
    out["policy"] = r.policy;
    out["trials"] = r.trials;
    out["seed"] = r.seed;
    out["rng"] = Rng::kAlgorithm;
    out["metric"] = r.metric;
    if (r.metric == "modal") {
        out["modal_outcome"] = result_key(r.modal_outcome);
    } else {
        out["tv_threshold"] = round_sig12(r.tv_threshold);
        out["plain_tv_exceeded"] = r.plain_tv_exceeded;
        out["encoded_tv_exceeded"] = r.encoded_tv_exceeded;
    }
    auto lane = [&](const RateEstimate& e, const std::map<ResultValue, std::uint64_t>& tally) {
        json l;
        l["rate"] = round_sig12(e.rate);
        l["ci_lo"] = round_sig12(e.ci_lo);
        l["ci_hi"] = round_sig12(e.ci_hi);
        if (r.metric == "modal") l["errors"] = e.errors;
        l["aborted"] = e.aborted;
        l["tally"] = tally_to_json(tally);
        return l;
    };
    out["plain"] = lane(r.plain, r.plain_tally);
    out["encoded"] = lane(r.encoded, r.encoded_tally);
    return out;
}

inline std::string report_to_csv(const TrialReport& r) {
    auto f = [](double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    std::string out =
        "code,channel,p,location,policy,trials,plain_rate,plain_ci_lo,plain_ci_hi,"
        "encoded_rate,encoded_ci_lo,encoded_ci_hi,seed\n";
    out += r.code + "," + channel_string(r.channel) + "," + f(r.p) + "," +
           location_string(r.location) + "," + r.policy + "," + std::to_string(r.trials) + "," +
           f(r.plain.rate) + "," + f(r.plain.ci_lo) + "," + f(r.plain.ci_hi) + "," +
           f(r.encoded.rate) + "," + f(r.encoded.ci_lo) + "," + f(r.encoded.ci_hi) + "," +
           std::to_string(r.seed) + "\n";
    return out;
}

} // namespace qecw
