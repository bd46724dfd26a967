#include "modal_stream/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "modal_stream/errors.hpp"

namespace modal_stream {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), tmp_path_(path + ".tmp") {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; the tmp file is left behind for inspection
    }
}

void CsvWriter::row(const std::vector<double>& values) {
    char num[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        std::snprintf(num, sizeof num, "%.12g", values[i]);
        buffer_ += num;
    }
    buffer_ += '\n';
}

void CsvWriter::raw_row(const std::string& line) {
    buffer_ += line;
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    closed_ = true;
    {
        std::ofstream out(tmp_path_, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp_path_);
        out << buffer_;
    }
    std::filesystem::rename(tmp_path_, path_);
}

int CsvTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (first) {
            while (std::getline(row, cell, ',')) table.header.push_back(cell);
            first = false;
            continue;
        }
        std::vector<double> values;
        while (std::getline(row, cell, ',')) {
            values.push_back(cell.empty() ? 0.0 : std::stod(cell));
        }
        table.rows.push_back(std::move(values));
    }
    return table;
}

void write_response_csv(const std::string& path, const Mat& series, double dt) {
    std::vector<std::string> header{"t"};
    for (int ch = 0; ch < series.rows(); ++ch) header.push_back("ch" + std::to_string(ch));
    CsvWriter writer(path, header);
    std::vector<double> row(series.rows() + 1);
    for (int k = 0; k < series.cols(); ++k) {
        row[0] = k * dt;
        for (int ch = 0; ch < series.rows(); ++ch) row[ch + 1] = series(ch, k);
        writer.row(row);
    }
    writer.close();
}

}  // namespace modal_stream
