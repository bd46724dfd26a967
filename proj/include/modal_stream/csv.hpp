#pragma once

#include <string>
#include <vector>

#include "modal_stream/linalg.hpp"

namespace modal_stream {

/// Row-oriented CSV writer with atomic rename on close.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();

    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);

    /// Flush and atomically move into place. Called by the destructor if
    /// not invoked explicitly.
    void close();

private:
    std::string path_;
    std::string tmp_path_;
    std::string buffer_;
    bool closed_ = false;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int col(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

/// `t, ch0..ch{n-1}` response series layout used across the CLI.
void write_response_csv(const std::string& path, const Mat& series, double dt);

}  // namespace modal_stream
