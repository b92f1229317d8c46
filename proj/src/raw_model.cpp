#include "vti/raw_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "vti/errors.hpp"

namespace vti {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        // trim
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return out;
}

int parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected integer in " + context + ", got '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected number in " + context + ", got '" + s + "'");
    }
}

Eigen::SparseMatrix<double> assemble(int n, const std::vector<Triplet>& triplets) {
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(triplets.size());
    for (const auto& t : triplets) ts.emplace_back(t.row, t.col, t.value);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(ts.begin(), ts.end());  // duplicates sum
    return m;
}

void check_symmetry(const Eigen::SparseMatrix<double>& m, const std::string& name) {
    double max_entry = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            max_entry = std::max(max_entry, std::abs(it.value()));
    if (max_entry == 0.0) return;
    Eigen::SparseMatrix<double> asym = Eigen::SparseMatrix<double>(m.transpose()) - m;
    double max_asym = 0.0;
    for (int k = 0; k < asym.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(asym, k); it; ++it)
            max_asym = std::max(max_asym, std::abs(it.value()));
    if (max_asym > 1e-10 * max_entry)
        throw ModelError(name + " matrix is not symmetric (relative asymmetry " +
                         std::to_string(max_asym / max_entry) + ")");
}

}  // namespace

Eigen::SparseMatrix<double> RawModel::assemble_mass() const {
    return assemble(n_dofs, mass_triplets);
}
Eigen::SparseMatrix<double> RawModel::assemble_damping() const {
    return assemble(n_dofs, damping_triplets);
}
Eigen::SparseMatrix<double> RawModel::assemble_stiffness() const {
    return assemble(n_dofs, stiffness_triplets);
}

bool RawModel::dof_is_blocked(int dof) const {
    for (const auto& n : node_table) {
        if (n.dof_w == dof) return n.blocked_w;
        if (n.dof_theta == dof) return n.blocked_theta;
    }
    return false;
}

std::vector<Triplet> read_matrix_file(const std::filesystem::path& file, int n_dofs) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open matrix file " + file.string());

    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty matrix file " + file.string());
    std::istringstream header(lower(line));
    std::string banner, object, fmt, field, symmetry;
    header >> banner >> object >> fmt >> field >> symmetry;
    if (banner.rfind("%%matrixmarket", 0) != 0 || object != "matrix" ||
        fmt != "coordinate" || field != "real")
        throw ParseError("malformed header in " + file.string() + ": '" + line + "'");
    bool symmetric;
    if (symmetry == "general") symmetric = false;
    else if (symmetry == "symmetric") symmetric = true;
    else throw ParseError("unsupported symmetry '" + symmetry + "' in " + file.string());

    // size line (after comments)
    long rows = -1, cols = -1, nnz = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        if (!(ss >> rows >> cols >> nnz))
            throw ParseError("malformed size line in " + file.string() + ": '" + line + "'");
        break;
    }
    if (rows < 0)
        throw ParseError("missing size line in " + file.string());
    if (rows != cols)
        throw ParseError("non-square matrix in " + file.string());
    if (n_dofs >= 0 && rows != n_dofs)
        throw ParseError("matrix size " + std::to_string(rows) + " in " + file.string() +
                         " does not match n_dofs " + std::to_string(n_dofs));

    std::vector<Triplet> triplets;
    long count = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        long r, c;
        double v;
        if (!(ss >> r >> c >> v))
            throw ParseError("malformed entry in " + file.string() + ": '" + line + "'");
        if (r < 1 || r > rows || c < 1 || c > rows)
            throw ParseError("index out of range in " + file.string() + ": (" +
                             std::to_string(r) + "," + std::to_string(c) + ") with size " +
                             std::to_string(rows));
        triplets.push_back({int(r - 1), int(c - 1), v});
        if (symmetric && r != c) triplets.push_back({int(c - 1), int(r - 1), v});
        ++count;
    }
    if (count != nnz)
        throw ParseError(file.string() + ": header announces " + std::to_string(nnz) +
                         " entries, found " + std::to_string(count));
    return triplets;
}

std::vector<NodeRecord> read_node_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open node table " + file.string());
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) != std::vector<std::string>{"node_id", "s", "dof_w", "dof_theta",
                                                    "blocked_w", "blocked_theta"})
        throw ParseError("bad node table header in " + file.string());
    std::vector<NodeRecord> nodes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw ParseError("bad node row in " + file.string() + ": " + line);
        NodeRecord n;
        n.node_id = parse_int(f[0], "node_id");
        n.s = parse_double(f[1], "s");
        n.dof_w = parse_int(f[2], "dof_w");
        n.dof_theta = parse_int(f[3], "dof_theta");
        n.blocked_w = parse_int(f[4], "blocked_w") != 0;
        n.blocked_theta = parse_int(f[5], "blocked_theta") != 0;
        nodes.push_back(n);
    }
    return nodes;
}

std::vector<ElementRecord> read_element_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open element table " + file.string());
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) != std::vector<std::string>{"element_id", "node_a", "node_b"})
        throw ParseError("bad element table header in " + file.string());
    std::vector<ElementRecord> elements;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 3) throw ParseError("bad element row in " + file.string() + ": " + line);
        elements.push_back({parse_int(f[0], "element_id"), parse_int(f[1], "node_a"),
                            parse_int(f[2], "node_b")});
    }
    return elements;
}

std::vector<SupportRecord> read_support_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open support table " + file.string());
    std::string line;
    if (!std::getline(in, line) ||
        split_csv(line) != std::vector<std::string>{"dof", "k", "c", "gap"})
        throw ParseError("bad support table header in " + file.string());
    std::vector<SupportRecord> supports;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 4) throw ParseError("bad support row in " + file.string() + ": " + line);
        SupportRecord s{parse_int(f[0], "dof"), parse_double(f[1], "k"),
                        parse_double(f[2], "c"), parse_double(f[3], "gap")};
        if (s.k < 0 || s.c < 0 || s.gap < 0)
            throw ModelError("negative support parameter in " + file.string() + ": " + line);
        supports.push_back(s);
    }
    return supports;
}

void validate_raw_model(const RawModel& model) {
    auto check_indices = [&](const std::vector<Triplet>& ts, const std::string& name) {
        for (const auto& t : ts)
            if (t.row < 0 || t.row >= model.n_dofs || t.col < 0 || t.col >= model.n_dofs)
                throw ParseError("index out of range in " + name + " triplets: (" +
                                 std::to_string(t.row) + "," + std::to_string(t.col) + ")");
    };
    check_indices(model.mass_triplets, "mass");
    check_indices(model.damping_triplets, "damping");
    check_indices(model.stiffness_triplets, "stiffness");

    check_symmetry(model.assemble_mass(), "mass");
    check_symmetry(model.assemble_stiffness(), "stiffness");

    std::vector<char> seen_dof(model.n_dofs, 0);
    for (const auto& n : model.node_table) {
        for (int d : {n.dof_w, n.dof_theta}) {
            if (d < 0) continue;
            if (d >= model.n_dofs)
                throw ModelError("node " + std::to_string(n.node_id) +
                                 " references dof " + std::to_string(d) +
                                 " >= n_dofs " + std::to_string(model.n_dofs));
            if (seen_dof[d])
                throw ModelError("dof " + std::to_string(d) + " referenced by two nodes");
            seen_dof[d] = 1;
        }
    }

    auto k = model.assemble_stiffness();
    Eigen::VectorXd diag = k.diagonal();
    for (const auto& n : model.node_table) {
        if (n.dof_w >= 0 && !n.blocked_w && diag[n.dof_w] <= 0.0)
            throw ModelError("non-positive stiffness diagonal on unblocked dof " +
                             std::to_string(n.dof_w));
        if (n.dof_theta >= 0 && !n.blocked_theta && diag[n.dof_theta] <= 0.0)
            throw ModelError("non-positive stiffness diagonal on unblocked dof " +
                             std::to_string(n.dof_theta));
    }

    for (const auto& s : model.supports)
        if (s.dof < 0 || s.dof >= model.n_dofs)
            throw ModelError("support references dof " + std::to_string(s.dof) +
                             " >= n_dofs " + std::to_string(model.n_dofs));

    // elements tile the rail line: node pairs adjacent in arclength, no overlap
    if (!model.element_table.empty()) {
        std::map<int, const NodeRecord*> by_id;
        for (const auto& n : model.node_table) by_id[n.node_id] = &n;
        double prev_end = -std::numeric_limits<double>::infinity();
        for (const auto& e : model.element_table) {
            auto a = by_id.find(e.node_a);
            auto b = by_id.find(e.node_b);
            if (a == by_id.end() || b == by_id.end())
                throw ModelError("element " + std::to_string(e.element_id) +
                                 " references unknown node");
            if (b->second->s <= a->second->s)
                throw ModelError("element " + std::to_string(e.element_id) +
                                 " has non-increasing arclength");
            if (prev_end != -std::numeric_limits<double>::infinity() &&
                std::abs(a->second->s - prev_end) > 1e-9)
                throw ModelError("elements do not tile the rail line at element " +
                                 std::to_string(e.element_id));
            prev_end = b->second->s;
        }
    }
}

RawModel load_model(const std::filesystem::path& mass_file,
                    const std::filesystem::path& damping_file,
                    const std::filesystem::path& stiffness_file,
                    const std::filesystem::path& node_table_file,
                    const std::filesystem::path& element_table_file,
                    const std::filesystem::path& support_file) {
    RawModel model;
    // size taken from the stiffness file, the others must agree
    {
        std::ifstream in(stiffness_file);
        if (!in) throw ParseError("cannot open matrix file " + stiffness_file.string());
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '%') continue;
            std::istringstream ss(line);
            long rows = 0, cols = 0, nnz = 0;
            ss >> rows >> cols >> nnz;
            model.n_dofs = int(rows);
            break;
        }
    }
    model.stiffness_triplets = read_matrix_file(stiffness_file, model.n_dofs);
    model.mass_triplets = read_matrix_file(mass_file, model.n_dofs);
    model.damping_triplets = read_matrix_file(damping_file, model.n_dofs);
    model.node_table = read_node_table(node_table_file);
    model.element_table = read_element_table(element_table_file);
    if (!support_file.empty() && std::filesystem::exists(support_file))
        model.supports = read_support_table(support_file);
    validate_raw_model(model);
    return model;
}

RawModel load_model(const std::filesystem::path& model_dir) {
    return load_model(model_dir / "M.mtx", model_dir / "C.mtx", model_dir / "K.mtx",
                      model_dir / "nodes.csv", model_dir / "elements.csv",
                      model_dir / "supports.csv");
}

void write_matrix_file(const std::filesystem::path& file, int n_dofs,
                       const std::vector<Triplet>& triplets, bool symmetric_storage) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write " + file.string());
    out << "%%MatrixMarket matrix coordinate real "
        << (symmetric_storage ? "symmetric" : "general") << "\n";
    std::vector<const Triplet*> kept;
    for (const auto& t : triplets) {
        if (symmetric_storage && t.col > t.row) continue;  // lower triangle
        kept.push_back(&t);
    }
    out << n_dofs << " " << n_dofs << " " << kept.size() << "\n";
    char buf[64];
    for (const auto* t : kept) {
        std::snprintf(buf, sizeof(buf), "%d %d %.16e\n", t->row + 1, t->col + 1, t->value);
        out << buf;
    }
}

void write_node_table(const std::filesystem::path& file, const std::vector<NodeRecord>& nodes) {
    std::ofstream out(file);
    out << "node_id,s,dof_w,dof_theta,blocked_w,blocked_theta\n";
    char buf[128];
    for (const auto& n : nodes) {
        std::snprintf(buf, sizeof(buf), "%d,%.16e,%d,%d,%d,%d\n", n.node_id, n.s, n.dof_w,
                      n.dof_theta, n.blocked_w ? 1 : 0, n.blocked_theta ? 1 : 0);
        out << buf;
    }
}

void write_element_table(const std::filesystem::path& file,
                         const std::vector<ElementRecord>& elements) {
    std::ofstream out(file);
    out << "element_id,node_a,node_b\n";
    for (const auto& e : elements)
        out << e.element_id << "," << e.node_a << "," << e.node_b << "\n";
}

void write_support_table(const std::filesystem::path& file,
                         const std::vector<SupportRecord>& supports) {
    std::ofstream out(file);
    out << "dof,k,c,gap\n";
    char buf[128];
    for (const auto& s : supports) {
        std::snprintf(buf, sizeof(buf), "%d,%.16e,%.16e,%.16e\n", s.dof, s.k, s.c, s.gap);
        out << buf;
    }
}

}  // namespace vti
