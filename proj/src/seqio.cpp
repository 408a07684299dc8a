#include "cstar/seqio.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cstar/error.hpp"

namespace cstar {

namespace {

std::string_view trim_cr(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
        line.remove_suffix(1);
    }
    return line;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

struct RawRecord {
    std::string id;
    std::string body;
};

std::vector<RawRecord> split_records(std::string_view bytes) {
    if (is_blank(bytes)) throw Error(ErrorKind::EmptyFile, "input contains no records");

    std::vector<RawRecord> records;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < bytes.size()) {
        std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string_view::npos) eol = bytes.size();
        std::string_view line = trim_cr(bytes.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '>') {
            std::string_view header = line.substr(1);
            std::size_t start = header.find_first_not_of(" \t");
            if (start == std::string_view::npos) {
                throw Error(ErrorKind::MalformedHeader, "empty header on line " + std::to_string(line_no));
            }
            header = header.substr(start);
            std::size_t end = header.find_first_of(" \t");
            records.push_back({std::string(header.substr(0, end)), {}});
            continue;
        }
        if (records.empty()) {
            throw Error(ErrorKind::MalformedHeader,
                        "sequence data before the first '>' header (line " + std::to_string(line_no) + ")");
        }
        auto& body = records.back().body;
        for (char c : line) {
            if (c == ' ' || c == '\t') continue;
            body.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    if (records.empty()) throw Error(ErrorKind::EmptyFile, "input contains no records");
    return records;
}

AlphabetKind detect(std::string_view residues) {
    bool rna = false;
    for (char c : residues) {
        if (c == kGap) continue;
        if (c == 'U') rna = true;
        if (std::string_view("ACGTUN").find(c) == std::string_view::npos) return AlphabetKind::Protein;
    }
    return rna ? AlphabetKind::Rna : AlphabetKind::Dna;
}

}  // namespace

FastaRecords parse_fasta(std::string_view bytes, const ParseOptions& options) {
    auto raw = split_records(bytes);

    FastaRecords out;
    out.alphabet.allows_ambiguity = options.permissive;
    out.alphabet.kind = options.alphabet_hint ? *options.alphabet_hint : detect(raw.front().body);
    out.sequences.reserve(raw.size());

    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& rec = raw[i];
        if (rec.body.empty()) throw Error(ErrorKind::EmptyRecord, "record '" + rec.id + "' has no residues");
        for (std::size_t off = 0; off < rec.body.size(); ++off) {
            char c = rec.body[off];
            if (c == kGap && options.allow_gaps) continue;
            if (!out.alphabet.accepts(c)) {
                throw Error(ErrorKind::IllegalResidue,
                            "record '" + rec.id + "' offset " + std::to_string(off) + ": '" + std::string(1, c) +
                                "' is not a " + std::string(to_string(out.alphabet.kind)) + " residue");
            }
        }
        out.sequences.push_back(Sequence{std::move(rec.id), std::move(rec.body), i, out.alphabet.kind});
    }
    return out;
}

std::string read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = std::move(buf).str();
    if (bytes.size() < 2 || static_cast<unsigned char>(bytes[0]) != 0x1F ||
        static_cast<unsigned char>(bytes[1]) != 0x8B) {
        return bytes;
    }

    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw Error(ErrorKind::IoFailure, "cannot open gzip stream '" + path + "'");
    std::string out;
    std::vector<char> chunk(1 << 16);
    int n = 0;
    while ((n = gzread(gz, chunk.data(), static_cast<unsigned>(chunk.size()))) > 0) {
        out.append(chunk.data(), static_cast<std::size_t>(n));
    }
    int status = 0;
    const char* msg = gzerror(gz, &status);
    gzclose(gz);
    if (n < 0 || status < 0) throw Error(ErrorKind::IoFailure, "corrupt gzip stream '" + path + "': " + msg);
    return out;
}

DatasetStats dataset_stats(const std::vector<Sequence>& seqs) {
    if (seqs.empty()) throw Error(ErrorKind::EmptyDataset, "no sequences");
    DatasetStats s;
    s.count = seqs.size();
    s.min_len = seqs.front().size();
    s.max_len = seqs.front().size();
    for (const auto& q : seqs) {
        s.min_len = std::min(s.min_len, q.size());
        s.max_len = std::max(s.max_len, q.size());
        s.total_bytes += q.size();
    }
    s.avg_len = static_cast<double>(s.total_bytes) / static_cast<double>(s.count);
    return s;
}

void write_fasta(const Msa& msa, std::ostream& sink) {
    validate_msa(msa);
    for (const auto& r : msa.rows) {
        sink << '>' << r.id << '\n';
        for (std::size_t pos = 0; pos < r.row.size(); pos += kFastaLineWidth) {
            sink.write(r.row.data() + pos,
                       static_cast<std::streamsize>(std::min(kFastaLineWidth, r.row.size() - pos)));
            sink << '\n';
        }
    }
    if (!sink) throw Error(ErrorKind::IoFailure, "write failed");
}

void write_fasta_file(const Msa& msa, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
    write_fasta(msa, out);
    out.flush();
    if (!out) throw Error(ErrorKind::IoFailure, "write to '" + path + "' failed");
}

Msa parse_msa(std::string_view bytes, const ParseOptions& options) {
    ParseOptions opts = options;
    opts.allow_gaps = true;
    auto records = parse_fasta(bytes, opts);
    Msa msa;
    msa.kind = records.alphabet.kind;
    msa.n_cols = records.sequences.front().size();
    for (auto& s : records.sequences) msa.rows.push_back({std::move(s.id), std::move(s.residues)});
    validate_msa(msa);
    return msa;
}

}  // namespace cstar
