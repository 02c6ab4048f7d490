//! Tabular data model, CSV ingestion and dataset-preparation transforms.

mod csv_io;
mod encode;
mod schema;
mod split;
mod table;
mod transform;

pub use csv_io::{load_csv, parse_csv, read_csv, to_csv_string, write_csv};
pub use encode::{
    argmax, decode, encode, Block, DesignColumn, DesignMatrix, Encoder, FeatureEncoding,
    ScaleParams,
};
pub use schema::{
    load_schema, parse_schema, validate_schema, ColumnKind, ColumnSpec, Role, BINARY_CATEGORIES,
};
pub use split::{split_indices, split_table_indices, train_test_split, Split, DEFAULT_TEST_FRACTION};
pub use table::{format_number, Column, ColumnData, DataTable};
pub use transform::{
    apply_steps, binarize_threshold, bucket_labels, bucket_numeric, drop_columns,
    drop_missing_rows, drop_sparse_columns, filter_rows, nearest_rank_q3, quartile_binarize,
    remove_dropped, set_role, Step, Threshold,
};
