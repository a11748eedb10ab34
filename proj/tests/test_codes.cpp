#include <catch2/catch.hpp>

#include <bit>
#include <cmath>
#include <optional>

#include "gen.hpp"
#include "oracle_dense.hpp"
#include "qecw/codes.hpp"
#include "qecw/simulate.hpp"

using namespace qecw;

namespace {

struct Codeword {
    StateVector st;
    std::vector<QubitId> ids;
    std::vector<QubitRef> refs;
    EncodedQubit eq;
};

/// α|0> + e^{iφ} β|1> column as a preparation rotation.
Rotation prep_rotation(double theta, double phi) {
    const Amplitude a(std::cos(theta / 2), 0.0);
    const Amplitude b = std::polar(std::sin(theta / 2), phi);
    return Rotation(a, -std::conj(b), b, std::conj(a));
}

Rotation random_prep(Rng& rng) {
    return prep_rotation(std::acos(1.0 - 2.0 * rng.next_unit()),
                         rng.next_unit() * 6.28318530717958648);
}

Codeword make_codeword(const CodeScheme& code, const std::optional<Rotation>& prep = {}) {
    Codeword cw;
    for (int i = 0; i < code.num_physical; ++i) {
        cw.ids.push_back(cw.st.alloc(false));
        cw.refs.emplace_back(cw.ids.back());
    }
    if (prep) cw.st.apply_rotation(cw.ids[0], *prep);
    cw.eq = EncodedQubit{&code, cw.refs};
    apply_unitary(cw.st, encode_unitary(cw.eq));
    return cw;
}

void run_correction(Codeword& cw, std::uint64_t seed = 0) {
    NameGen gen;
    Env env;
    Rng rng(seed);
    exec_fragment(cw.st, correction_fragment(cw.eq, gen), env, rng);
}

std::vector<std::optional<Rotation>> logical_test_preps(Rng& rng) {
    std::vector<std::optional<Rotation>> preps{std::nullopt, rot_x(), rot_h()};
    for (int i = 0; i < 10; ++i) preps.push_back(random_prep(rng));
    return preps;
}

} // namespace

TEST_CASE("the catalog holds the three codes") {
    CHECK(get_code("bitflip3").num_physical == 3);
    CHECK(get_code("phaseflip3").num_physical == 3);
    CHECK(get_code("steane7").num_physical == 7);
    CHECK_THROWS_AS(get_code("shor9"), UnknownCode);
}

TEST_CASE("encoding fragments prepare the expected codewords") {
    SECTION("bitflip3 from |0> fixes |000>") {
        NameGen gen;
        auto [eq, frag] = mk_encoded(get_code("bitflip3"), false, "p", gen);
        StateVector st;
        Env env;
        Rng rng(0);
        exec_fragment(st, frag, env, rng);
        CHECK(std::abs(st.amplitude({{env["p"], false},
                                     {env[eq.qubits[1].name()], false},
                                     {env[eq.qubits[2].name()], false}}) -
                       Amplitude(1, 0)) < 1e-12);
        CHECK(env["p"] == st.allocated()[0]); // parent is the first allocation
    }
    SECTION("bitflip3 from |1> matches the two-CNOT oracle") {
        NameGen gen;
        auto [eq, frag] = mk_encoded(get_code("bitflip3"), true, "p", gen);
        StateVector st;
        Env env;
        Rng rng(0);
        exec_fragment(st, frag, env, rng);

        oracle::DenseSim d(3);
        d.apply_x(0);
        d.apply_cnot(0, 1);
        d.apply_cnot(0, 2);
        CHECK(oracle::fidelity_vs_dense(d, st, st.allocated()) == Approx(1.0).margin(1e-12));
    }
    SECTION("phaseflip3 from |0> gives the all-plus state") {
        Codeword cw = make_codeword(get_code("phaseflip3"));
        oracle::DenseSim d(3);
        d.apply_cnot(0, 1);
        d.apply_cnot(0, 2);
        for (int q = 0; q < 3; ++q) d.apply_h(q);
        CHECK(oracle::fidelity_vs_dense(d, cw.st, cw.ids) == Approx(1.0).margin(1e-12));
    }
}

namespace {

/// Independent characterization of the Steane codespace: project the bare
/// state with (I+S)/2 for every stabilizer generator and normalize.
oracle::DenseSim steane_projector_oracle(bool logical_one) {
    const std::vector<std::vector<int>> rows{{0, 2, 4, 6}, {1, 2, 5, 6}, {3, 4, 5, 6}};
    oracle::DenseSim d(7);
    if (logical_one) { // logical X = X0 X1 X2 on the bare state
        d.apply_x(0);
        d.apply_x(1);
        d.apply_x(2);
    }
    // X-type stabilizers: new[v] = (old[v] + old[v ^ mask]) / 2.
    for (const auto& row : rows) {
        std::size_t mask = 0;
        for (int j : row) mask |= std::size_t(1) << j;
        auto next = d.amp;
        for (std::size_t v = 0; v < next.size(); ++v)
            next[v] = (d.amp[v] + d.amp[v ^ mask]) / 2.0;
        d.amp = std::move(next);
    }
    // Z-type stabilizers: kill odd-parity components.
    for (const auto& row : rows) {
        std::size_t mask = 0;
        for (int j : row) mask |= std::size_t(1) << j;
        for (std::size_t v = 0; v < d.amp.size(); ++v)
            if (std::popcount(v & mask) % 2 == 1) d.amp[v] = 0.0;
    }
    double norm = 0.0;
    for (const auto& a : d.amp) norm += std::norm(a);
    for (auto& a : d.amp) a /= std::sqrt(norm);
    return d;
}

} // namespace

TEST_CASE("steane7 encoding matches the stabilizer-projector oracle") {
    SECTION("logical zero is the even-weight codeword superposition") {
        Codeword cw = make_codeword(get_code("steane7"));
        CHECK(cw.st.term_count() == 8);

        const double expected = 1.0 / std::sqrt(8.0);
        cw.st.for_each_term([&](const BasisState&, Amplitude a) {
            CHECK(std::abs(a - Amplitude(expected, 0.0)) < 1e-9);
        });

        oracle::DenseSim d = steane_projector_oracle(false);
        CHECK(oracle::fidelity_vs_dense(d, cw.st, cw.ids) >= 1.0 - 1e-9);
    }
    SECTION("logical one") {
        Codeword cw = make_codeword(get_code("steane7"), rot_x());
        oracle::DenseSim d = steane_projector_oracle(true);
        CHECK(oracle::fidelity_vs_dense(d, cw.st, cw.ids) >= 1.0 - 1e-9);
    }
}

TEST_CASE("parents are the first tuple entry") {
    const CodeScheme& c3 = get_code("bitflip3");
    EncodedQubit eq3{&c3, {QubitId{4}, QubitId{5}, QubitId{6}}};
    CHECK(parent_of(eq3) == QubitRef(QubitId{4}));

    const CodeScheme& c7 = get_code("steane7");
    std::vector<QubitRef> refs;
    for (std::uint32_t i = 0; i < 7; ++i) refs.emplace_back(QubitId{i});
    EncodedQubit eq7{&c7, refs};
    CHECK(parent_of(eq7) == QubitRef(QubitId{0}));
}

TEST_CASE("decode inverts encode on arbitrary logical states") {
    Rng rng(41);
    for (const std::string& name : code_names()) {
        const CodeScheme& code = get_code(name);
        for (const auto& prep : logical_test_preps(rng)) {
            StateVector st;
            std::vector<QubitRef> refs;
            for (int i = 0; i < code.num_physical; ++i) refs.emplace_back(st.alloc(false));
            if (prep) st.apply_rotation(refs[0].id(), *prep);
            const StateVector before = st;

            EncodedQubit eq{&code, refs};
            apply_unitary(st, encode_unitary(eq));
            apply_unitary(st, decode_unitary(eq));
            INFO(name);
            CHECK(fidelity(before, st) >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("bitflip3 encodes amplitudes onto the codeword pair") {
    Codeword cw = make_codeword(get_code("bitflip3"), Rotation(0.6, -0.8, 0.8, 0.6));
    BasisState zeros{{cw.ids[0], false}, {cw.ids[1], false}, {cw.ids[2], false}};
    BasisState ones{{cw.ids[0], true}, {cw.ids[1], true}, {cw.ids[2], true}};
    CHECK(std::abs(cw.st.amplitude(zeros) - Amplitude(0.6, 0)) < 1e-12);
    CHECK(std::abs(cw.st.amplitude(ones) - Amplitude(0.8, 0)) < 1e-12);
}

TEST_CASE("correction restores every single correctable error exactly") {
    Rng rng(43);

    struct Case {
        const char* code;
        std::vector<Rotation> paulis;
    };
    const Case cases[] = {
        {"bitflip3", {rot_x()}},
        {"phaseflip3", {rot_z()}},
        {"steane7", {rot_x(), rot_y(), rot_z()}},
    };

    for (const auto& c : cases) {
        const CodeScheme& code = get_code(c.code);
        for (const auto& prep : logical_test_preps(rng)) {
            Codeword cw = make_codeword(code, prep);
            const StateVector reference = cw.st;
            for (int pos = 0; pos < code.num_physical; ++pos) {
                for (const Rotation& pauli : c.paulis) {
                    Codeword damaged = cw;
                    damaged.st.apply_rotation(damaged.ids[size_t(pos)], pauli);
                    run_correction(damaged);
                    INFO(c.code << " error at " << pos);
                    CHECK(fidelity(reference, damaged.st) >= 1.0 - 1e-9);
                    CHECK(damaged.st.num_qubits() == std::size_t(code.num_physical));
                }
            }
        }
    }
}

TEST_CASE("correction leaves clean codewords untouched") {
    Codeword cw = make_codeword(get_code("bitflip3"), Rotation(0.6, -0.8, 0.8, 0.6));
    const StateVector reference = cw.st;
    run_correction(cw);
    CHECK(fidelity(reference, cw.st) >= 1.0 - 1e-9);
}

TEST_CASE("bitflip3 does not correct what it cannot see") {
    SECTION("a phase flip passes through and damages logical plus") {
        Codeword cw = make_codeword(get_code("bitflip3"), rot_h());
        const StateVector reference = cw.st;
        cw.st.apply_rotation(cw.ids[0], rot_z());
        run_correction(cw);
        CHECK(fidelity(reference, cw.st) < 1e-9); // orthogonal logical state
    }
    SECTION("two bit flips decode to the orthogonal logical state") {
        Codeword cw = make_codeword(get_code("bitflip3"));
        const StateVector reference = cw.st;
        Codeword flipped = make_codeword(get_code("bitflip3"), rot_x());

        cw.st.apply_rotation(cw.ids[0], rot_x());
        cw.st.apply_rotation(cw.ids[1], rot_x());
        run_correction(cw);
        CHECK(fidelity(reference, cw.st) < 1e-9);
        CHECK(fidelity(flipped.st, cw.st) >= 1.0 - 1e-9);
    }
}

TEST_CASE("encoded measurement reads and keeps the logical value") {
    SECTION("logical one measures true and re-encodes") {
        Codeword cw = make_codeword(get_code("bitflip3"), rot_x());
        Env env;
        Rng rng(0);
        std::map<Name, bool> results;
        exec_fragment(cw.st, measure_encoded(cw.eq, "b"), env, rng, &results);
        CHECK(results.at("b") == true);
        BasisState ones{{cw.ids[0], true}, {cw.ids[1], true}, {cw.ids[2], true}};
        CHECK(std::abs(cw.st.amplitude(ones) - Amplitude(1, 0)) < 1e-9);
    }
    SECTION("logical zero measures false") {
        Codeword cw = make_codeword(get_code("bitflip3"));
        Env env;
        Rng rng(0);
        std::map<Name, bool> results;
        exec_fragment(cw.st, measure_encoded(cw.eq, "b"), env, rng, &results);
        CHECK(results.at("b") == false);
        BasisState zeros{{cw.ids[0], false}, {cw.ids[1], false}, {cw.ids[2], false}};
        CHECK(std::abs(cw.st.amplitude(zeros) - Amplitude(1, 0)) < 1e-9);
    }
    SECTION("logical plus is an exact coin flip") {
        // Name-based program so the exact evaluator can branch on it.
        const CodeScheme& code = get_code("bitflip3");
        EncodedQubit eq{&code, {QubitRef("p"), QubitRef("c1"), QubitRef("c2")}};
        QProgram p;
        p.stmts.push_back(MkQbitStmt{false, "p"});
        p.stmts.push_back(MkQbitStmt{false, "c1"});
        p.stmts.push_back(MkQbitStmt{false, "c2"});
        p.stmts.push_back(ApplyStmt{u_of({g_rot("p", rot_h())})});
        p.stmts.push_back(ApplyStmt{encode_unitary(eq)});
        ProgramFragment meas = measure_encoded(eq, "b");
        p.stmts.insert(p.stmts.end(), meas.begin(), meas.end());
        p.stmts.push_back(ReturnStmt{{"b"}});

        const auto dist = evaluate_exact(p);
        CHECK(dist.prob({false}) == Approx(0.5).margin(1e-9));
        CHECK(dist.prob({true}) == Approx(0.5).margin(1e-9));
    }
    SECTION("agrees with decoding fully and measuring the parent") {
        Rng rng(53);
        for (const std::string& code_name : code_names()) {
            const CodeScheme& code = get_code(code_name);
            const Rotation prep = random_prep(rng);

            std::vector<QubitRef> refs;
            refs.emplace_back("p");
            for (int i = 1; i < code.num_physical; ++i)
                refs.emplace_back("c" + std::to_string(i));
            EncodedQubit eq{&code, refs};

            auto base = [&]() {
                QProgram p;
                for (const QubitRef& r : refs) p.stmts.push_back(MkQbitStmt{false, r.name()});
                p.stmts.push_back(ApplyStmt{u_of({g_rot("p", prep)})});
                p.stmts.push_back(ApplyStmt{encode_unitary(eq)});
                return p;
            };

            QProgram lifted = base();
            ProgramFragment meas = measure_encoded(eq, "b");
            lifted.stmts.insert(lifted.stmts.end(), meas.begin(), meas.end());
            lifted.stmts.push_back(ReturnStmt{{"b"}});

            QProgram direct = base();
            direct.stmts.push_back(ApplyStmt{decode_unitary(eq)});
            direct.stmts.push_back(MeasureStmt("p", "b"));
            direct.stmts.push_back(ReturnStmt{{"b"}});

            const auto a = evaluate_exact(lifted);
            const auto d = evaluate_exact(direct);
            INFO(code_name);
            CHECK(std::abs(a.prob({true}) - d.prob({true})) < 1e-9);
            CHECK(std::abs(a.prob({false}) - d.prob({false})) < 1e-9);
        }
    }
}

TEST_CASE("non-unitary matrices are rejected at construction") {
    CHECK_THROWS_AS(Rotation(1.0, 0.0, 1.0, 1.0), NotUnitary);
    CHECK_THROWS_AS(Rotation(0.5, 0.5, 0.5, 0.5), NotUnitary);
    CHECK_NOTHROW(Rotation(0.6, -0.8, 0.8, 0.6));
}

TEST_CASE("lifted rotations use transversal overrides when available") {
    SECTION("transversal X exchanges the codeword amplitudes") {
        Codeword cw = make_codeword(get_code("bitflip3"), Rotation(0.6, -0.8, 0.8, 0.6));
        const Unitary lifted = lifted_rot(cw.eq, rot_x());
        CHECK(lifted == u_of({g_rot(cw.refs[0], rot_x()), g_rot(cw.refs[1], rot_x()),
                              g_rot(cw.refs[2], rot_x())}));
        apply_unitary(cw.st, lifted);
        BasisState zeros{{cw.ids[0], false}, {cw.ids[1], false}, {cw.ids[2], false}};
        BasisState ones{{cw.ids[0], true}, {cw.ids[1], true}, {cw.ids[2], true}};
        CHECK(std::abs(cw.st.amplitude(zeros) - Amplitude(0.8, 0)) < 1e-12);
        CHECK(std::abs(cw.st.amplitude(ones) - Amplitude(0.6, 0)) < 1e-12);
    }
    SECTION("transversal and decode-rotate-encode paths agree on codewords") {
        Rng rng(47);
        struct Pair {
            const char* code;
            std::vector<Rotation> gates;
        };
        const Pair pairs[] = {
            {"bitflip3", {rot_x()}},
            {"phaseflip3", {rot_z()}},
            {"steane7", {rot_x(), rot_z(), rot_h()}},
        };
        for (const auto& pr : pairs) {
            const CodeScheme& code = get_code(pr.code);
            for (const Rotation& gate : pr.gates) {
                for (int trial = 0; trial < 8; ++trial) {
                    Codeword a = make_codeword(code, random_prep(rng));
                    Codeword b = a;

                    Unitary transversal = lifted_rot(a.eq, gate);
                    Unitary default_path = decode_unitary(a.eq);
                    default_path.append(g_rot(a.eq.parent(), gate));
                    default_path.append(encode_unitary(a.eq));
                    REQUIRE_FALSE(transversal == default_path);

                    apply_unitary(a.st, transversal);
                    apply_unitary(b.st, default_path);
                    INFO(pr.code);
                    CHECK(fidelity(a.st, b.st) >= 1.0 - 1e-9);
                }
            }
        }
    }
    SECTION("identity lifts to the identity") {
        Rng rng(3);
        Codeword cw = make_codeword(get_code("steane7"), random_prep(rng));
        const StateVector before = cw.st;
        apply_unitary(cw.st, lifted_rot(cw.eq, rot_identity()));
        CHECK(fidelity(before, cw.st) >= 1.0 - 1e-9);
    }
}

TEST_CASE("lifted swap exchanges logical contents") {
    const CodeScheme& code = get_code("bitflip3");
    StateVector st;
    std::vector<QubitRef> ra, rb;
    for (int i = 0; i < 3; ++i) ra.emplace_back(st.alloc(false));
    for (int i = 0; i < 3; ++i) rb.emplace_back(st.alloc(false));
    st.apply_rotation(ra[0].id(), rot_x()); // first logical |1>, second |0>
    EncodedQubit ea{&code, ra}, eb{&code, rb};
    apply_unitary(st, encode_unitary(ea));
    apply_unitary(st, encode_unitary(eb));

    StateVector expected;
    for (int i = 0; i < 6; ++i) expected.alloc(false);
    expected.apply_rotation(rb[0].id(), rot_x()); // contents exchanged
    apply_unitary(expected, encode_unitary(ea));
    apply_unitary(expected, encode_unitary(eb));

    const StateVector before = st;
    apply_unitary(st, lifted_swap(ea, eb));
    CHECK(fidelity(expected, st) >= 1.0 - 1e-9);

    apply_unitary(st, lifted_swap(ea, eb));
    CHECK(fidelity(before, st) >= 1.0 - 1e-9); // involution

    const CodeScheme& other = get_code("steane7");
    std::vector<QubitRef> rc;
    for (std::uint32_t i = 10; i < 17; ++i) rc.emplace_back(QubitId{i});
    EncodedQubit ec{&other, rc};
    CHECK_THROWS_AS(lifted_swap(ea, ec), CodeMismatch);

    EncodedQubit overlapping{&code, {ra[0], ra[1], rb[0]}};
    CHECK_THROWS_AS(lifted_swap(ea, overlapping), OverlappingTuples);
}

TEST_CASE("lifted scoped temporaries obey the ancilla contract") {
    const CodeScheme& code = get_code("bitflip3");

    SECTION("identity body leaves no trace") {
        Codeword cw = make_codeword(code, Rotation(0.6, -0.8, 0.8, 0.6));
        const StateVector before = cw.st;
        NameGen gen;
        const Unitary u = lifted_ulet(code, false, gen, [](const EncodedQubit&) {
            return Unitary{};
        });
        apply_unitary(cw.st, u);
        CHECK(fidelity(before, cw.st) >= 1.0 - 1e-9);
        CHECK(cw.st.num_qubits() == 3);
    }
    SECTION("a body that flips the temporary logically aborts") {
        Codeword cw = make_codeword(code);
        NameGen gen;
        const Unitary u = lifted_ulet(code, false, gen, [](const EncodedQubit& temp) {
            return lifted_rot(temp, rot_x());
        });
        CHECK_THROWS_AS(apply_unitary(cw.st, u), AncillaNotReturned);
    }
    SECTION("workspace for a logical CNOT") {
        StateVector st;
        std::vector<QubitRef> ra, rb;
        for (int i = 0; i < 3; ++i) ra.emplace_back(st.alloc(false));
        for (int i = 0; i < 3; ++i) rb.emplace_back(st.alloc(false));
        st.apply_rotation(ra[0].id(), rot_x());
        EncodedQubit ea{&code, ra}, eb{&code, rb};
        apply_unitary(st, encode_unitary(ea));
        apply_unitary(st, encode_unitary(eb));

        auto logical_cnot = [&](const EncodedQubit& c, const EncodedQubit& t) {
            Unitary u = decode_unitary(c);
            u.append(g_cond(c.parent(), Unitary{}, lifted_rot(t, rot_x())));
            u.append(encode_unitary(c));
            return u;
        };
        NameGen gen;
        const Unitary u = lifted_ulet(code, false, gen, [&](const EncodedQubit& temp) {
            Unitary body = logical_cnot(ea, temp);
            body.append(logical_cnot(temp, eb));
            body.append(logical_cnot(ea, temp));
            return body;
        });
        apply_unitary(st, u);
        CHECK(st.num_qubits() == 6);

        StateVector expected; // both logical |1>
        for (int i = 0; i < 6; ++i) expected.alloc(false);
        expected.apply_rotation(ra[0].id(), rot_x());
        expected.apply_rotation(rb[0].id(), rot_x());
        apply_unitary(expected, encode_unitary(ea));
        apply_unitary(expected, encode_unitary(eb));
        CHECK(fidelity(expected, st) >= 1.0 - 1e-9);
    }
}
