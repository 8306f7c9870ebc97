#include "sigflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace sigflow {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string location(const std::filesystem::path& file, std::size_t line, std::size_t col) {
    std::ostringstream os;
    os << file.string() << ":" << line << ":" << col;
    return os.str();
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_number(const std::string& text, const std::filesystem::path& file, std::size_t line,
                    std::size_t col) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw CsvError(location(file, line, col) + ": expected a number, got '" + text + "'");
    return value;
}

// All rows of a CSV file as fields, with 1-based line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw CsvError("cannot open " + file.string());
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        rows.emplace_back(line_no, split_fields(line));
    }
    if (rows.empty()) throw CsvError(file.string() + ": file is empty");
    return rows;
}

void expect_fields(const std::filesystem::path& file, std::size_t line,
                   const std::vector<std::string>& fields, std::size_t count) {
    if (fields.size() != count)
        throw CsvError(location(file, line, fields.size() < count ? fields.size() + 1 : count + 1) +
                       ": expected " + std::to_string(count) + " fields, got " +
                       std::to_string(fields.size()));
}

std::ofstream open_out(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw CsvError("cannot write " + file.string());
    return out;
}

// Columns t,u1..ud and optionally a trailing z.
std::pair<SampledPath, Eigen::VectorXd> read_path_like(const std::filesystem::path& file,
                                                       bool with_output) {
    const auto rows = read_rows(file);
    const auto& [hline, header] = rows.front();
    const std::size_t cols = header.size();
    const std::size_t d = cols - 1 - (with_output ? 1 : 0);
    if (header[0] != "t" || d < 1)
        throw CsvError(location(file, hline, 1) + ": expected header t,u1,...");
    for (std::size_t c = 1; c <= d; ++c)
        if (header[c] != "u" + std::to_string(c))
            throw CsvError(location(file, hline, c + 1) + ": expected column u" + std::to_string(c));
    if (with_output && header.back() != "z")
        throw CsvError(location(file, hline, cols) + ": expected final column z");

    const std::size_t n_rows = rows.size() - 1;
    std::vector<double> times(n_rows);
    Eigen::MatrixXd values(n_rows, d);
    Eigen::VectorXd output(with_output ? n_rows : 0);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [line_no, fields] = rows[r];
        expect_fields(file, line_no, fields, cols);
        times[r - 1] = parse_number(fields[0], file, line_no, 1);
        for (std::size_t c = 0; c < d; ++c)
            values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
                parse_number(fields[c + 1], file, line_no, c + 2);
        if (with_output) output[static_cast<Eigen::Index>(r - 1)] = parse_number(fields[cols - 1], file, line_no, cols);
    }
    return {SampledPath(TimeGrid(std::move(times)), std::move(values)), std::move(output)};
}

}  // namespace

void write_path_csv(const std::filesystem::path& file, const SampledPath& u) {
    auto out = open_out(file);
    out << "t";
    for (int c = 1; c <= u.channels(); ++c) out << ",u" << c;
    out << "\n";
    for (int k = 0; k < u.grid.size(); ++k) {
        out << format_double(u.grid.time(k));
        for (int c = 0; c < u.channels(); ++c) out << "," << format_double(u.values(k, c));
        out << "\n";
    }
}

SampledPath read_path_csv(const std::filesystem::path& file) {
    return read_path_like(file, false).first;
}

void write_trajectory_csv(const std::filesystem::path& file, const SampledPath& input,
                          const Eigen::VectorXd& output) {
    if (output.size() != input.grid.size())
        throw std::invalid_argument("write_trajectory_csv: output length mismatch");
    auto out = open_out(file);
    out << "t";
    for (int c = 1; c <= input.channels(); ++c) out << ",u" << c;
    out << ",z\n";
    for (int k = 0; k < input.grid.size(); ++k) {
        out << format_double(input.grid.time(k));
        for (int c = 0; c < input.channels(); ++c) out << "," << format_double(input.values(k, c));
        out << "," << format_double(output[k]) << "\n";
    }
}

std::pair<SampledPath, Eigen::VectorXd> read_trajectory_csv(const std::filesystem::path& file) {
    return read_path_like(file, true);
}

void write_dataset_csv(const std::filesystem::path& dir, const Dataset& data) {
    std::filesystem::create_directories(dir);
    for (int m = 0; m < data.trajectories(); ++m) {
        std::ostringstream name;
        name << "traj_" << std::setw(5) << std::setfill('0') << m << ".csv";
        write_trajectory_csv(dir / name.str(), data.inputs[static_cast<std::size_t>(m)],
                             data.outputs[static_cast<std::size_t>(m)]);
    }
}

Dataset read_dataset_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw CsvError("no trajectory CSV files in " + dir.string());

    std::vector<SampledPath> inputs;
    std::vector<Eigen::VectorXd> outputs;
    for (const auto& f : files) {
        auto [input, output] = read_trajectory_csv(f);
        inputs.push_back(std::move(input));
        outputs.push_back(std::move(output));
    }
    const double z0 = outputs.front()[0];
    TimeGrid grid = inputs.front().grid;
    return Dataset(std::move(grid), std::move(inputs), std::move(outputs), z0);
}

void write_output_csv(const std::filesystem::path& file, const TimeGrid& grid,
                      const Eigen::VectorXd& z) {
    if (z.size() != grid.size()) throw std::invalid_argument("write_output_csv: length mismatch");
    auto out = open_out(file);
    out << "t,z\n";
    for (int k = 0; k < grid.size(); ++k)
        out << format_double(grid.time(k)) << "," << format_double(z[k]) << "\n";
}

std::pair<TimeGrid, Eigen::VectorXd> read_output_csv(const std::filesystem::path& file) {
    const auto rows = read_rows(file);
    const auto& [hline, header] = rows.front();
    if (header.size() != 2 || header[0] != "t" || header[1] != "z")
        throw CsvError(location(file, hline, 1) + ": expected header t,z");
    std::vector<double> times(rows.size() - 1);
    Eigen::VectorXd z(static_cast<Eigen::Index>(rows.size()) - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [line_no, fields] = rows[r];
        expect_fields(file, line_no, fields, 2);
        times[r - 1] = parse_number(fields[0], file, line_no, 1);
        z[static_cast<Eigen::Index>(r - 1)] = parse_number(fields[1], file, line_no, 2);
    }
    return {TimeGrid(std::move(times)), std::move(z)};
}

void write_model_csv(const std::filesystem::path& file, const SigModel& model) {
    auto out = open_out(file);
    out << "# order = " << model.order << "\n";
    out << "# channels = " << model.channels << "\n";
    out << "# z0 = " << format_double(model.z0) << "\n";
    out << "# gamma = " << format_double(model.gamma) << "\n";
    out << "# grid =";
    for (double t : model.grid.points()) out << " " << format_double(t);
    out << "\n";
    out << "index,beta\n";
    for (Eigen::Index i = 0; i < model.beta.size(); ++i)
        out << i << "," << format_double(model.beta[i]) << "\n";
}

SigModel read_model_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw CsvError("cannot open " + file.string());
    int order = -1, channels = -1;
    double z0 = 0.0, gamma = -1.0;
    bool have_z0 = false;
    std::vector<double> grid_times;
    std::vector<double> beta;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream meta(line.substr(1));
            std::string key, eq;
            meta >> key >> eq;
            if (eq != "=") throw CsvError(location(file, line_no, 1) + ": malformed metadata line");
            std::string tok;
            if (key == "order") { meta >> order; }
            else if (key == "channels") { meta >> channels; }
            else if (key == "z0") { meta >> tok; z0 = parse_number(tok, file, line_no, 2); have_z0 = true; }
            else if (key == "gamma") { meta >> tok; gamma = parse_number(tok, file, line_no, 2); }
            else if (key == "grid") {
                while (meta >> tok) grid_times.push_back(parse_number(tok, file, line_no, 2));
            } else throw CsvError(location(file, line_no, 1) + ": unknown metadata key '" + key + "'");
            if (key != "grid" && key != "z0" && key != "gamma" && meta.fail())
                throw CsvError(location(file, line_no, 1) + ": malformed metadata value");
            continue;
        }
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "index" || fields[1] != "beta")
                throw CsvError(location(file, line_no, 1) + ": expected header index,beta");
            header_seen = true;
            continue;
        }
        expect_fields(file, line_no, fields, 2);
        const double idx = parse_number(fields[0], file, line_no, 1);
        if (idx != static_cast<double>(beta.size()))
            throw CsvError(location(file, line_no, 1) + ": beta rows out of order");
        beta.push_back(parse_number(fields[1], file, line_no, 2));
    }
    if (order < 0 || channels < 0 || !have_z0 || gamma < 0.0 || grid_times.empty())
        throw CsvError(file.string() + ": missing model metadata");
    if (static_cast<long>(beta.size()) != feature_count(channels, order))
        throw CsvError(file.string() + ": beta length does not match order and channels");
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    return SigModel{std::move(b), order, channels, z0, gamma, TimeGrid(std::move(grid_times))};
}

void write_signature_csv(std::ostream& os, const TruncatedTensorSeries& s) {
    os << "# alphabet = " << s.alphabet() << "\n";
    os << "# order = " << s.order() << "\n";
    os << "word,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        os << word_string(word_from_index(s.alphabet(), i)) << "," << format_double(s.data()[i])
           << "\n";
}

void write_signature_csv(const std::filesystem::path& file, const TruncatedTensorSeries& s) {
    auto out = open_out(file);
    write_signature_csv(out, s);
}

TruncatedTensorSeries read_signature_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw CsvError("cannot open " + file.string());
    int alphabet = -1, order = -1;
    std::vector<std::pair<Word, double>> entries;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream meta(line.substr(1));
            std::string key, eq;
            meta >> key >> eq;
            if (key == "alphabet") meta >> alphabet;
            else if (key == "order") meta >> order;
            else throw CsvError(location(file, line_no, 1) + ": unknown metadata key '" + key + "'");
            continue;
        }
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "word" || fields[1] != "value")
                throw CsvError(location(file, line_no, 1) + ": expected header word,value");
            header_seen = true;
            continue;
        }
        expect_fields(file, line_no, fields, 2);
        entries.emplace_back(parse_word(fields[0]), parse_number(fields[1], file, line_no, 2));
    }
    if (alphabet < 1 || order < 0) throw CsvError(file.string() + ": missing signature metadata");
    TruncatedTensorSeries s(alphabet, order);
    for (const auto& [w, v] : entries) s.coeff(w) = v;
    return s;
}

void write_solve_report_csv(const std::filesystem::path& file, const SolveReport& report) {
    auto out = open_out(file);
    out << "iter,objective,grad_norm,lambda\n";
    for (const auto& p : report.trace)
        out << p.iter << "," << format_double(p.objective) << "," << format_double(p.gradient_norm)
            << "," << format_double(p.lambda) << "\n";
}

}  // namespace sigflow
