#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef TRACELAYOUT_FIXTURES
#define TRACELAYOUT_FIXTURES "tests/fixtures"
#endif

namespace testsupport
{

inline std::string fixture_path(const std::string& name) { return std::string(TRACELAYOUT_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) { return slurp(fixture_path(name)); }

// A small random relational world, kept as plain data so oracles can work
// on it without going through the library.
struct GenSig
{
    std::string name;               // display name, qualified as "this/<name>"
    int parent = -1;                // index into sigs, -1 for univ
    std::vector<std::string> atoms;  // own atoms
};

struct GenField
{
    std::string name;
    std::vector<int> columns;  // sig indices
    std::vector<std::vector<std::string>> tuples;
};

struct GenWorld
{
    std::vector<GenSig> sigs;
    std::vector<GenField> fields;

    bool is_sub(int sig, int ancestor) const
    {
        for (int s = sig; s >= 0; s = sigs[s].parent)
            if (s == ancestor) return true;
        return false;
    }

    std::vector<std::string> atoms_of(int sig) const
    {
        std::vector<std::string> out;
        for (int s = 0; s < static_cast<int>(sigs.size()); ++s)
            if (is_sub(s, sig)) out.insert(out.end(), sigs[s].atoms.begin(), sigs[s].atoms.end());
        return out;
    }
};

// <= 5 atoms per sig, <= 3 fields, arity 2..3. Sig 3, when present, extends sig 0.
inline GenWorld random_world(std::mt19937_64& rng)
{
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    GenWorld w;
    const int nsigs = pick(1, 4);
    for (int i = 0; i < nsigs; ++i)
    {
        GenSig s;
        s.name = "S" + std::to_string(i);
        s.parent = (i == 3) ? 0 : -1;
        const int natoms = pick(0, 5);
        for (int a = 0; a < natoms; ++a) s.atoms.push_back(s.name + "$" + std::to_string(a));
        w.sigs.push_back(std::move(s));
    }
    const int nfields = pick(0, 3);
    for (int f = 0; f < nfields; ++f)
    {
        GenField fd;
        fd.name = "f" + std::to_string(f);
        const int arity = pick(2, 3);
        for (int c = 0; c < arity; ++c) fd.columns.push_back(pick(0, nsigs - 1));
        std::vector<std::vector<std::string>> pools;
        bool empty = false;
        for (int c : fd.columns)
        {
            pools.push_back(w.atoms_of(c));
            empty = empty || pools.back().empty();
        }
        const int ntuples = empty ? 0 : pick(0, 8);
        for (int t = 0; t < ntuples; ++t)
        {
            std::vector<std::string> tup;
            for (const auto& pool : pools) tup.push_back(pool[pick(0, static_cast<int>(pool.size()) - 1)]);
            fd.tuples.push_back(std::move(tup));
        }
        w.fields.push_back(std::move(fd));
    }
    return w;
}

inline std::string world_xml(const GenWorld& w)
{
    std::ostringstream os;
    os << "<alloy builddate=\"test\">\n<instance bitwidth=\"4\" command=\"Run gen\" filename=\"gen.als\">\n";
    os << "<sig label=\"univ\" ID=\"0\" builtin=\"yes\"></sig>\n";
    for (std::size_t i = 0; i < w.sigs.size(); ++i)
    {
        const auto& s = w.sigs[i];
        os << "<sig label=\"this/" << s.name << "\" ID=\"" << (i + 1) << "\" parentID=\""
           << (s.parent < 0 ? 0 : s.parent + 1) << "\">\n";
        for (const auto& a : s.atoms) os << "  <atom label=\"" << a << "\"/>\n";
        os << "</sig>\n";
    }
    std::size_t id = w.sigs.size() + 1;
    for (const auto& f : w.fields)
    {
        os << "<field label=\"" << f.name << "\" ID=\"" << id++ << "\" parentID=\"" << (f.columns[0] + 1)
           << "\">\n";
        for (const auto& t : f.tuples)
        {
            os << "  <tuple>";
            for (const auto& a : t) os << " <atom label=\"" << a << "\"/>";
            os << " </tuple>\n";
        }
        os << "  <types>";
        for (int c : f.columns) os << " <type ID=\"" << (c + 1) << "\"/>";
        os << " </types>\n</field>\n";
    }
    os << "</instance>\n</alloy>\n";
    return os.str();
}

using Tuples = std::vector<std::vector<std::string>>;

inline Tuples canonical(Tuples t)
{
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

// Filter-and-drop written directly over the generator's tuple lists.
inline std::map<std::string, Tuples> projection_oracle(const GenWorld& w, int sig, const std::string& atom)
{
    std::map<std::string, Tuples> out;
    for (const auto& f : w.fields)
    {
        std::vector<bool> projected;
        for (int c : f.columns) projected.push_back(w.is_sub(c, sig));
        Tuples kept;
        for (const auto& t : f.tuples)
        {
            bool all = true;
            std::vector<std::string> r;
            for (std::size_t i = 0; i < t.size(); ++i)
            {
                if (projected[i])
                    all = all && t[i] == atom;
                else
                    r.push_back(t[i]);
            }
            if (all) kept.push_back(r);
        }
        out[f.name] = canonical(kept);
    }
    return out;
}

}  // namespace testsupport
