#include "normality/runfile.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <unistd.h>

namespace normality {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::map<std::string, std::string> fields(const std::string& line) {
    std::map<std::string, std::string> out;
    for (auto& f : split(line, '\t')) {
        auto eq = f.find('=');
        if (eq == std::string::npos) throw FormatError("malformed field '" + f + "'");
        out[f.substr(0, eq)] = f.substr(eq + 1);
    }
    return out;
}

const std::string& need(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw FormatError("missing field '" + key + "'");
    return it->second;
}

std::uint64_t to_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("expected a natural number, got '" + s + "'");
    return std::stoull(s);
}

std::string join_set(const BaseSet& R) {
    std::string out;
    for (auto r : R) out += (out.empty() ? "" : ",") + std::to_string(r);
    return out;
}

BaseSet parse_set(const std::string& s) {
    BaseSet out;
    if (s.empty()) return out;
    for (auto& part : split(s, ',')) out.insert(to_u64(part));
    return out;
}

Theorem parse_theorem(const std::string& s) {
    if (s == "thm2") return Theorem::thm2;
    if (s == "thm4") return Theorem::thm4;
    if (s == "thm5") return Theorem::thm5;
    throw FormatError("unknown theorem '" + s + "'");
}

const char* kReserved[] = {"theorem", "mode", "seed", "cap_ell", "cap_k", "cap_N", "samples", "leveque_floor", "schmidt_c"};

}  // namespace

void write_run(std::ostream& out, const ConstructedReal& x) {
    const Schedule& s = x.sched;
    out << "nfrun/1\ttheorem=" << theorem_name(x.theorem) << "\tmode=" << (s.mode == Mode::desk ? "desk" : "faithful")
        << "\tseed=" << s.seed << "\tcap_ell=" << s.cap_ell << "\tcap_k=" << s.cap_k << "\tcap_N=" << s.cap_N
        << "\tsamples=" << s.samples << "\tleveque_floor=" << to_string(s.leveque_floor)
        << "\tschmidt_c=" << to_string(s.schmidt.c);
    for (auto& [k, v] : x.inputs) out << '\t' << k << '=' << v;
    out << '\n';
    for (auto& line : x.report) out << "# " << line << '\n';
    for (const StageState& st : x.stages) {
        out << "stage=" << st.stage_index << "\tclause=" << st.clause << "\ts=" << st.s.value << "\tk=" << st.k
            << "\teps=" << to_string(st.eps) << "\tb=" << st.b << "\tell=" << st.ell << "\tc=" << st.c
            << "\tx=" << st.x << "\tR=" << join_set(st.R) << "\tkbar=" << st.kbar << "\ta=" << st.a
            << "\tpower=" << st.interval.power << "\tdepth=" << st.interval.depth << "\tblock=";
        for (std::size_t i = 0; i < st.block.size(); ++i) out << (i ? " " : "") << st.block.digits[i];
        out << "\tlo=" << to_string(st.interval.lower()) << "\thi=" << to_string(st.interval.upper()) << '\n';
    }
}

ConstructedReal read_run(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty run file");
    if (line.rfind("nfrun/1\t", 0) != 0) throw FormatError("missing nfrun/1 header");
    auto head = fields(line.substr(8));
    ConstructedReal x;
    x.theorem = parse_theorem(need(head, "theorem"));
    const std::string& mode = need(head, "mode");
    if (mode != "desk" && mode != "faithful") throw FormatError("unknown mode '" + mode + "'");
    x.sched.mode = mode == "desk" ? Mode::desk : Mode::faithful;
    x.sched.seed = to_u64(need(head, "seed"));
    x.sched.cap_ell = to_u64(need(head, "cap_ell"));
    x.sched.cap_k = static_cast<unsigned>(to_u64(need(head, "cap_k")));
    x.sched.cap_N = to_u64(need(head, "cap_N"));
    x.sched.samples = to_u64(need(head, "samples"));
    try {
        x.sched.leveque_floor = parse_rational(need(head, "leveque_floor"));
        x.sched.schmidt.c = parse_rational(need(head, "schmidt_c"));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    for (auto& [k, v] : head) {
        bool reserved = false;
        for (auto* r : kReserved) reserved = reserved || k == r;
        if (!reserved) x.inputs[k] = v;
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            x.report.push_back(line.substr(2));
            continue;
        }
        auto f = fields(line);
        StageState st;
        try {
            st.stage_index = to_u64(need(f, "stage"));
            st.clause = need(f, "clause");
            st.s = Base{to_u64(need(f, "s"))};
            st.k = static_cast<unsigned>(to_u64(need(f, "k")));
            st.eps = parse_rational(need(f, "eps"));
            st.b = to_u64(need(f, "b"));
            st.ell = to_u64(need(f, "ell"));
            st.c = to_u64(need(f, "c"));
            st.x = to_u64(need(f, "x"));
            st.R = parse_set(need(f, "R"));
            st.kbar = static_cast<unsigned>(to_u64(need(f, "kbar")));
            st.a = to_u64(need(f, "a"));
            const unsigned power = static_cast<unsigned>(to_u64(need(f, "power")));
            const std::uint64_t depth = to_u64(need(f, "depth"));
            const Integer block_base = ipow(st.s.value, st.k);
            std::vector<std::uint32_t> digits;
            const std::string& bs = need(f, "block");
            if (!bs.empty())
                for (auto& d : split(bs, ' ')) digits.push_back(static_cast<std::uint32_t>(to_u64(d)));
            st.block = DigitBlock(block_base.get_ui(), std::move(digits));
            const Rational lo = parse_rational(need(f, "lo")), hi = parse_rational(need(f, "hi"));
            const Integer radix = ipow(st.s.value, std::uint64_t(power) * depth);
            Rational scaled = lo * radix;
            if (scaled.get_den() != 1) throw FormatError("interval endpoint is not adic at the stated depth");
            st.interval = AdicInterval(st.s, power, depth, scaled.get_num());
            if (st.interval.upper() != hi) throw FormatError("interval width does not match its depth");
        } catch (const std::domain_error& e) {
            throw FormatError(std::string("stage record: ") + e.what());
        } catch (const std::invalid_argument& e) {
            throw FormatError(std::string("stage record: ") + e.what());
        }
        if (st.stage_index != x.stages.size()) throw FormatError("stage records out of order");
        x.stages.push_back(std::move(st));
    }
    if (x.stages.empty()) throw FormatError("run file has no stages");
    return x;
}

void write_digits(std::ostream& out, const DigitBlock& d) {
    out << "nfdig/1 base=" << d.base << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.digits[i];
        out << ((i + 1) % 64 == 0 || i + 1 == d.size() ? '\n' : ' ');
    }
}

DigitBlock read_digits(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty digit file");
    if (line.rfind("nfdig/1 base=", 0) != 0) throw FormatError("missing nfdig/1 header");
    const std::uint64_t base = to_u64(line.substr(13));
    if (base < 2) throw FormatError("digit file base must be >= 2");
    std::vector<std::uint32_t> digits;
    std::string tok;
    while (in >> tok) {
        std::uint64_t d = to_u64(tok);
        if (d >= base) throw FormatError("digit " + tok + " out of range for base " + std::to_string(base));
        digits.push_back(static_cast<std::uint32_t>(d));
    }
    return DigitBlock(base, std::move(digits));
}

void write_file_atomic(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp);
        f << content;
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw std::runtime_error("write failed for " + path);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename into " + path);
    }
}

std::string read_file(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace normality
