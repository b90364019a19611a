#pragma once

// Command-line front end. `run` is separate from main() so tests can drive it.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermolocc/thermolocc.hpp"

namespace thermolocc::cli {

using json = nlohmann::json;

enum ExitCode { kOk = 0, kInvalid = 1, kNegative = 2 };

inline double fix_tolerance() {
    if (const char* env = std::getenv("THERMOLOCC_TOLERANCE")) {
        try {
            std::size_t pos = 0;
            double v = std::stod(env, &pos);
            if (pos == std::string(env).size() && v > 0.0) return v;
        } catch (const std::exception&) {
        }
        throw Error("THERMOLOCC_TOLERANCE must be a positive number");
    }
    return kFixTol;
}

inline std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(std::string("invalid number in ") + what + ": '" + item + "'");
        }
    }
    if (v.empty()) throw Error(std::string(what) + " is empty");
    return v;
}

/// Inline JSON, "@path", or a path to an existing file.
inline json load_json(const std::string& arg) {
    std::string text = arg;
    std::string path = !arg.empty() && arg[0] == '@' ? arg.substr(1) : arg;
    if ((!arg.empty() && arg[0] == '@') || std::filesystem::is_regular_file(path)) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("invalid JSON: ") + e.what());
    }
}

inline InverseTemperature parse_beta(const std::string& s) { return io::beta_from_json(json(s)); }

struct Options {
    std::string p, q, r, energies = "0,1", energies_b, beta = "0", format = "json";
    std::string tensor, protocol, input, joint, rho, kind = "bithermal", slot = "first", base = "permutation";
    std::string order = "A";
    double ga = 1.0, gb = 1.0;
    std::size_t copies = 1;
    unsigned long seed = 0;
    bool cnot = false, swap_a = false, swap_b = false;
};

class App {
public:
    App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(int argc, const char* const* argv) {
        CLI::App app{"thermolocc: thermal operations, LTOCC protocols and thermal CHSH bounds"};
        app.require_subcommand(1);
        app.add_option("--seed", o_.seed, "Seed for sampling subcommands")->capture_default_str();
        std::function<int()> action;

        auto energies = [&](CLI::App* c) {
            c->add_option("--energies", o_.energies, "Comma-separated energy levels")->capture_default_str();
            c->add_option("--beta", o_.beta, "Inverse temperature (number or inf)")->capture_default_str();
        };
        auto pq = [&](CLI::App* c, bool need_q) {
            c->add_option("--p", o_.p, "First distribution (comma-separated)")->required();
            auto q = c->add_option("--q", o_.q, "Second distribution (comma-separated)");
            if (need_q) q->required();
        };

        auto* curve = app.add_subcommand("curve", "Thermomajorization curve elbows (CSV by default)");
        energies(curve);
        curve->add_option("--p", o_.p, "Distribution")->required();
        curve->add_option("--format", o_.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        curve->callback([&] { action = [&] { return cmd_curve(curve->count("--format") ? o_.format : "csv"); }; });

        auto* check = app.add_subcommand("check", "Order relations; exit 2 when false");
        check->require_subcommand(1);
        for (const char* rel : {"majorize", "thermo", "ut"}) {
            auto* c = check->add_subcommand(rel, std::string("Decide the ") + rel + " relation p > q");
            pq(c, true);
            if (std::string(rel) == "thermo") energies(c);
            std::string name = rel;
            c->callback([&, name] { action = [&, name] { return cmd_check(name); }; });
        }

        auto* witness = app.add_subcommand("witness", "Gibbs-preserving matrix mapping p to q; exit 2 if infeasible");
        energies(witness);
        pq(witness, true);
        witness->callback([&] { action = [&] { return cmd_witness(); }; });

        auto* tensor = app.add_subcommand("tensor", "Stochastic tensor operations");
        tensor->require_subcommand(1);
        {
            auto* c = tensor->add_subcommand("check", "Stochastic/thermal/bithermal/tristochastic report");
            energies(c);
            c->add_option("--tensor", o_.tensor, "Tensor JSON or file")->required();
            c->add_option("--slot", o_.slot, "Property deciding the exit code: first, second, both")
                ->check(CLI::IsMember({"first", "second", "both"}))
                ->capture_default_str();
            c->callback([&] { action = [&] { return cmd_tensor_check(); }; });
        }
        {
            auto* c = tensor->add_subcommand("apply", "r = T(p, q)");
            c->add_option("--tensor", o_.tensor, "Tensor JSON or file")->required();
            pq(c, true);
            c->callback([&] { action = [&] { return cmd_tensor_apply(); }; });
        }
        {
            auto* c = tensor->add_subcommand("vertices", "Vertices of a tensor polytope");
            energies(c);
            c->add_option("--kind", o_.kind, "bithermal, thermal or bicooling")
                ->check(CLI::IsMember({"bithermal", "thermal", "bicooling"}))
                ->capture_default_str();
            c->add_option("--slot", o_.slot, "Thermal slot for --kind thermal: first or second")
                ->check(CLI::IsMember({"first", "second"}));
            c->callback([&] { action = [&] { return cmd_tensor_vertices(); }; });
        }
        {
            auto* c = tensor->add_subcommand("family", "Recursive extremal bithermal tensor");
            energies(c);
            c->callback([&] { action = [&] { return cmd_tensor_family(); }; });
        }
        {
            auto* c = tensor->add_subcommand("tangents", "First-order extremal directions around a tristochastic tensor");
            c->add_option("--energies", o_.energies, "Comma-separated energy levels")->capture_default_str();
            c->add_option("--base", o_.base, "\"permutation\" or tensor JSON/file")->capture_default_str();
            c->callback([&] { action = [&] { return cmd_tensor_tangents(); }; });
        }

        auto* protocol = app.add_subcommand("protocol", "LTOCC protocols");
        protocol->require_subcommand(1);
        {
            auto* c = protocol->add_subcommand("run", "Output distribution of a protocol");
            c->add_option("--protocol", o_.protocol, "Protocol JSON or file")->required();
            c->add_option("--input", o_.input, "Joint input distribution (d_A x d_B JSON)")->required();
            c->callback([&] { action = [&] { return cmd_protocol("run"); }; });
            auto* m = protocol->add_subcommand("compose", "Transition matrix of a memoryless protocol");
            m->add_option("--protocol", o_.protocol, "Protocol JSON or file")->required();
            m->callback([&] { action = [&] { return cmd_protocol("compose"); }; });
            auto* v = protocol->add_subcommand("validate", "Invariant report; exit 2 if invalid");
            v->add_option("--protocol", o_.protocol, "Protocol JSON or file")->required();
            v->callback([&] { action = [&] { return cmd_protocol("validate"); }; });
        }

        auto* corr = app.add_subcommand("correlations", "Mutual information and conditional entropies (nats)");
        corr->add_option("--joint", o_.joint, "Joint distribution JSON or file")->required();
        corr->callback([&] { action = [&] { return cmd_correlations(); }; });

        auto* reach = app.add_subcommand("reach", "Reachability of r from (p, q); exit 2 when false");
        reach->require_subcommand(1);
        for (const char* kind : {"thermal", "bithermal", "enhanced"}) {
            auto* c = reach->add_subcommand(kind, std::string(kind) + " reachability decision");
            energies(c);
            pq(c, true);
            c->add_option("--r", o_.r, "Target distribution")->required();
            std::string name = kind;
            c->callback([&, name] { action = [&, name] { return cmd_reach(name); }; });
        }

        auto* chsh = app.add_subcommand("chsh", "Thermally restricted CHSH");
        chsh->require_subcommand(1);
        for (const char* what : {"bound", "attain"}) {
            auto* c = chsh->add_subcommand(what, std::string("CHSH ") + what + " for n copies");
            c->add_option("--energies", o_.energies, "Comma-separated energy levels")->capture_default_str();
            c->add_option("--copies", o_.copies, "Number of copies n")->capture_default_str();
            std::string name = what;
            c->callback([&, name] { action = [&, name] { return cmd_chsh(name); }; });
        }
        {
            auto* c = chsh->add_subcommand("modes", "Modes of coherence of a bipartite state");
            c->add_option("--energies", o_.energies, "Alice's energy levels")->capture_default_str();
            c->add_option("--energies-b", o_.energies_b, "Bob's energy levels (default: Alice's)");
            c->add_option("--rho", o_.rho, "Real density matrix JSON (default: maximally entangled state)");
            c->callback([&] { action = [&] { return cmd_chsh("modes"); }; });
        }

        auto* gates = app.add_subcommand("gates", "Thermal CNOT/SWAP approximants");
        gates->require_subcommand(1);
        {
            auto* c = gates->add_subcommand("cnot", "Thermal CNOT matrix (index 2i + j)");
            c->add_option("--ga", o_.ga, "Boltzmann factor of Alice's qubit")->capture_default_str();
            c->add_option("--gb", o_.gb, "Boltzmann factor of Bob's qubit")->capture_default_str();
            c->add_option("--order", o_.order, "Control party: A or B")
                ->check(CLI::IsMember({"A", "B"}))
                ->capture_default_str();
            c->callback([&] { action = [&] { return cmd_gates("cnot"); }; });
            auto* s = gates->add_subcommand("swap", "Thermal SWAP as three alternating CNOTs");
            s->add_option("--ga", o_.ga, "Boltzmann factor of Alice's qubit")->capture_default_str();
            s->add_option("--gb", o_.gb, "Boltzmann factor of Bob's qubit")->capture_default_str();
            s->add_option("--order", o_.order, "First CNOT controlled by A or B")
                ->check(CLI::IsMember({"A", "B"}))
                ->capture_default_str();
            s->callback([&] { action = [&] { return cmd_gates("swap"); }; });
            auto* d = gates->add_subcommand("distance", "Total variation distance to the classical gate");
            d->add_option("--ga", o_.ga, "Boltzmann factor of Alice's qubit")->capture_default_str();
            d->add_option("--gb", o_.gb, "Boltzmann factor of Bob's qubit")->capture_default_str();
            auto* g1 = d->add_flag("--cnot", o_.cnot, "A-controlled CNOT");
            auto* g2 = d->add_flag("--swap-a", o_.swap_a, "SWAP starting with the A-controlled CNOT");
            auto* g3 = d->add_flag("--swap-b", o_.swap_b, "SWAP starting with the B-controlled CNOT");
            g1->excludes(g2)->excludes(g3);
            g2->excludes(g3);
            d->callback([&] { action = [&] { return cmd_gates("distance"); }; });
        }

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            out_ << app.help();
            return kOk;
        } catch (const CLI::CallForAllHelp& e) {
            out_ << app.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError& e) {
            return fail(e.what());
        }
        try {
            return action ? action() : fail("no subcommand given");
        } catch (const std::exception& e) {
            return fail(e.what());
        }
    }

private:
    std::ostream& out_;
    std::ostream& err_;
    Options o_;

    int fail(const std::string& msg) {
        err_ << json{{"error", msg}}.dump() << '\n';
        return kInvalid;
    }
    void emit(const json& j) { out_ << j.dump(2) << '\n'; }
    int verdict(bool v, json extra = json::object()) {
        extra["result"] = v;
        emit(extra);
        return v ? kOk : kNegative;
    }

    ProbVector vec(const std::string& s, const char* what) const { return ProbVector(parse_list(s, what)); }
    EnergySpectrum spectrum(const std::string& s) const { return EnergySpectrum(parse_list(s, "energies")); }
    GibbsWeights gamma() const { return gibbs_weights(spectrum(o_.energies), parse_beta(o_.beta)); }

    int cmd_curve(const std::string& format) {
        auto c = thermo_curve(vec(o_.p, "p"), gamma());
        if (format == "csv")
            out_ << io::curve_csv(c);
        else
            emit({{"elbows", io::to_json(c)}});
        return kOk;
    }

    int cmd_check(const std::string& rel) {
        auto p = vec(o_.p, "p"), q = vec(o_.q, "q");
        if (p.size() != q.size()) throw Error("p and q have different dimensions");
        bool v = rel == "majorize" ? majorizes(p, q) : rel == "ut" ? ut_majorizes(p, q) : thermo_majorizes(p, q, gamma());
        return verdict(v, {{"relation", rel}});
    }

    int cmd_witness() {
        auto p = vec(o_.p, "p"), q = vec(o_.q, "q");
        auto g = gamma();
        auto w = witness_matrix(p, q, g);
        if (!w) {
            emit({{"result", "infeasible"}});
            return kNegative;
        }
        emit({{"result", "feasible"}, {"matrix", io::to_json(*w)}, {"gibbs_preserving", is_gibbs_preserving(*w, g, fix_tolerance())}});
        return kOk;
    }

    int cmd_tensor_check() {
        double tol = fix_tolerance();
        auto t3 = io::tensor3_from_json(load_json(o_.tensor));
        StochasticTensor t;
        try {
            t = StochasticTensor(t3, 1e-9);
        } catch (const Error& e) {
            emit({{"stochastic", false}, {"reason", e.what()}});
            return kNegative;
        }
        auto g = gamma();
        bool f = is_thermal(t, g, ThermalSlot::First, tol), s = is_thermal(t, g, ThermalSlot::Second, tol);
        json j = {{"stochastic", true}, {"thermal_first", f}, {"thermal_second", s}, {"bithermal", f && s},
                  {"tristochastic", is_tristochastic(t, tol)}, {"layers", format_layers(t.tensor())}};
        emit(j);
        bool ok = o_.slot == "first" ? f : o_.slot == "second" ? s : (f && s);
        return ok ? kOk : kNegative;
    }

    int cmd_tensor_apply() {
        auto t = io::tensor_from_json(load_json(o_.tensor));
        emit({{"r", io::to_json(apply_tensor(t, vec(o_.p, "p"), vec(o_.q, "q")))}});
        return kOk;
    }

    int cmd_tensor_vertices() {
        std::vector<StochasticTensor> vs;
        if (o_.kind == "bicooling") {
            vs = bicooling_extremals(spectrum(o_.energies).dimension());
        } else if (o_.kind == "thermal") {
            vs = enumerate_thermal_vertices(gamma(), o_.slot == "second" ? ThermalSlot::Second : ThermalSlot::First);
        } else {
            vs = enumerate_bithermal_vertices(gamma());
        }
        json arr = json::array();
        std::size_t zero_one = 0;
        for (const auto& t : vs) {
            arr.push_back(io::to_json(t));
            zero_one += is_zero_one(t.tensor());
        }
        emit({{"kind", o_.kind}, {"count", vs.size()}, {"zero_one", zero_one}, {"vertices", arr}});
        return kOk;
    }

    int cmd_tensor_family() {
        auto t = extremal_family(spectrum(o_.energies), parse_beta(o_.beta));
        json j = io::to_json(t);
        j["layers"] = format_layers(t.tensor());
        emit(j);
        return kOk;
    }

    int cmd_tensor_tangents() {
        auto spec = spectrum(o_.energies);
        StochasticTensor base = o_.base == "permutation" ? cyclic_permutation_tensor(spec.dimension())
                                                         : io::tensor_from_json(load_json(o_.base));
        auto rep = tangent_cone_extremals(base, spec);
        json ext = json::array();
        for (const auto& t : rep.extremals) ext.push_back(io::to_json(t.a1));
        json j = {{"count", rep.extremals.size()}, {"rays", rep.rays.size()}, {"expected", rep.expected},
                  {"matches_expected", rep.matches_expected}, {"extremals", ext}};
        if (!rep.matches_expected)
            j["discrepancy"] = {{"expected", rep.expected},
                                {"found", rep.extremals.size()},
                                {"convention", "vertices of the first-order polyhedron (basic feasible solutions)"},
                                {"signatures", rep.signatures}};
        emit(j);
        return kOk;
    }

    int cmd_protocol(const std::string& what) {
        auto proto = io::protocol_from_json(load_json(o_.protocol));
        if (what == "validate") {
            auto rep = validate(proto, fix_tolerance());
            emit({{"valid", rep.ok}, {"memoryless", proto.memoryless()}, {"memory_registers", rep.memory_registers},
                  {"problems", rep.problems}});
            return rep.ok ? kOk : kNegative;
        }
        if (what == "compose") {
            emit({{"matrix", io::to_json(compose_matrix(proto))}});
            return kOk;
        }
        auto out = run_protocol(proto, io::joint_from_json(load_json(o_.input)));
        emit({{"output", io::to_json(out)}});
        return kOk;
    }

    int cmd_correlations() {
        auto r = io::joint_from_json(load_json(o_.joint));
        emit({{"mutual_information", mutual_information(r)},
              {"H_A_given_B", conditional_entropy(r, Party::B)},
              {"H_B_given_A", conditional_entropy(r, Party::A)}});
        return kOk;
    }

    int cmd_reach(const std::string& kind) {
        auto p = vec(o_.p, "p"), q = vec(o_.q, "q"), r = vec(o_.r, "r");
        auto g = gamma();
        if (kind == "thermal") return verdict(thermal_reachable(p, q, r, g), {{"kind", kind}});
        if (kind == "bithermal") return verdict(bithermal_reachable_exact(p, q, r, g), {{"kind", kind}});
        auto c = enhanced_necessary_detail(p, q, r, g);
        std::vector<double> rbar(c.rbar.data(), c.rbar.data() + c.rbar.size());
        return verdict(c.holds, {{"kind", kind}, {"rbar", rbar}, {"rbar_valid", c.rbar_valid}});
    }

    int cmd_chsh(const std::string& what) {
        if (what == "modes") {
            auto sa = spectrum(o_.energies);
            auto sb = o_.energies_b.empty() ? sa : spectrum(o_.energies_b);
            const std::size_t D = sa.dimension() * sb.dimension();
            ComplexMatrix rho;
            if (o_.rho.empty()) {
                if (sa.dimension() != sb.dimension()) throw Error("default state needs equal local dimensions");
                Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(D);
                for (std::size_t i = 0; i < sa.dimension(); ++i) psi[i * sb.dimension() + i] = 1.0 / std::sqrt(double(sa.dimension()));
                rho = psi * psi.adjoint();
            } else {
                rho = io::matrix_from_json(load_json(o_.rho)).cast<std::complex<double>>();
            }
            auto dec = mode_decompose(rho, sa, sb);
            json modes = json::array();
            for (const auto& m : dec.modes) {
                json entries = json::array();
                for (Eigen::Index u = 0; u < m.component.rows(); ++u)
                    for (Eigen::Index v = 0; v < m.component.cols(); ++v)
                        if (m.component(u, v) != 0.0) entries.push_back({u, v, m.component(u, v).real()});
                modes.push_back({{"omega_a", m.omega_a}, {"omega_b", m.omega_b}, {"entries", entries}});
            }
            emit({{"modes", modes}});
            return kOk;
        }
        auto spec = spectrum(o_.energies);
        if (what == "bound") {
            auto prof = degeneracy_profile(spec, o_.copies);
            json j = io::to_json(prof);
            j["bound"] = ltocc_chsh_bound(prof);
            emit(j);
            return kOk;
        }
        auto a = chsh_attain(spec, o_.copies);
        json j = io::to_json(a.profile);
        j["bound"] = a.bound;
        j["attained"] = a.attained;
        emit(j);
        return kOk;
    }

    int cmd_gates(const std::string& what) {
        if (what == "cnot") {
            auto m = o_.order == "A" ? thermal_cnot(o_.gb, Party::A) : thermal_cnot(o_.ga, Party::B);
            emit({{"matrix", io::to_json(m)}});
            return kOk;
        }
        if (what == "swap") {
            auto m = thermal_swap_gate(o_.ga, o_.gb, o_.order == "A" ? SwapOrder::AFirst : SwapOrder::BFirst);
            emit({{"matrix", io::to_json(m)}});
            return kOk;
        }
        double dist;
        std::string gate;
        if (o_.swap_a) {
            gate = "swap_a";
            dist = tv_distance(classical_swap(), thermal_swap_gate(o_.ga, o_.gb, SwapOrder::AFirst).matrix());
        } else if (o_.swap_b) {
            gate = "swap_b";
            dist = tv_distance(classical_swap(), thermal_swap_gate(o_.ga, o_.gb, SwapOrder::BFirst).matrix());
        } else {
            gate = "cnot";
            dist = tv_distance(classical_cnot(Party::A), thermal_cnot(o_.gb, Party::A).matrix());
        }
        emit({{"gate", gate}, {"distance", dist}});
        return kOk;
    }
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    App app(out, err);
    return app.run(argc, argv);
}

} // namespace thermolocc::cli
