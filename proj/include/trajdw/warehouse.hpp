#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajdw::wh {

struct SchemaMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DanglingForeignKey : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownDimension : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One hierarchy level and the member attribute columns it governs.
struct Level {
    std::string name;
    std::vector<std::string> attributes;
};

struct DimensionSchema {
    std::string name;        // "geographical", "temporal", "events", "trajectory", "social"
    std::string table_file;  // persisted CSV file name
    std::string key_column;  // surrogate key column name
    std::vector<Level> levels;
    std::vector<std::string> attr_columns;  // flattened, column order in the CSV
};

struct Dimension {
    const DimensionSchema* schema = nullptr;
    std::vector<std::vector<std::string>> members;  // index == surrogate key; [0] is UNKNOWN
    std::map<std::vector<std::string>, std::int64_t> index;
};

struct FactRow {
    std::int64_t fact_id = 0;  // assigned on insert
    // natural key, used for reload idempotence
    std::string traj_id;
    std::int64_t segment_ordinal = 0;
    // foreign surrogate keys
    std::int64_t geo_space_id = 0;
    std::int64_t temp_inst_id = 0;
    std::int64_t events_rep_id = 0;
    std::int64_t traj_rep_id = 0;
    std::int64_t social_inter_id = 0;
    // measures
    double duration_s = 0.0;
    double travel_distance_m = 0.0;
    double average_trajectory_speed = 0.0;
    std::int64_t num_points = 0;
    std::int64_t num_semantic_stops = 0;
    std::int64_t num_mobility_modes = 0;
    double square_area_m2 = 0.0;
    double event_time_duration_s = 0.0;
    double activity_duration_s = 0.0;
};

struct IntegrityReport {
    std::vector<std::string> dangling_keys;
    std::vector<std::string> duplicate_members;
    std::vector<std::string> measure_violations;
    bool empty() const {
        return dangling_keys.empty() && duplicate_members.empty() && measure_violations.empty();
    }
};

inline const std::vector<std::string> kMeasureColumns = {
    "DurationS",        "TravelDistanceM", "AverageTrajectorySpeed",
    "NumPoints",        "NumSemanticStops", "NumMobilityModes",
    "SquareAreaM2",     "EventTimeDurationS", "ActivityDurationS"};

inline constexpr const char* kFactTableFile = "fact_traj_tbl.csv";

class Warehouse {
  public:
    Warehouse();

    static const std::vector<DimensionSchema>& dimension_schemas();
    static const DimensionSchema& dimension_schema(const std::string& dim);

    /// Top-to-bottom level names for roll-up.
    static std::vector<std::string> hierarchy_levels(const std::string& dim);

    /// Find-or-create on the full attribute tuple; keys start at 1, 0 is UNKNOWN.
    std::int64_t resolve_dimension_member(const std::string& dim,
                                          const std::vector<std::string>& attrs);

    std::int64_t insert_fact(FactRow row);
    bool has_natural_key(const std::string& traj_id, std::int64_t segment_ordinal) const;

    const Dimension& dimension(const std::string& dim) const;
    const std::vector<FactRow>& facts() const { return facts_; }

    IntegrityReport integrity_check() const;

    /// Attribute tuple of a member; throws DanglingForeignKey for unknown keys.
    const std::vector<std::string>& member(const std::string& dim, std::int64_t key) const;

    void save(const std::string& dir) const;
    static Warehouse load(const std::string& dir);

    /// Machine-readable listing of dimensions, levels, attributes, and measures.
    static std::string schema_descriptor_json();

  private:
    std::map<std::string, Dimension> dims_;
    std::vector<FactRow> facts_;
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> natural_index_;
};

}  // namespace trajdw::wh
