//! Sparse sampling and wavelet analysis on circulant graphs.
//!
//! The crate provides circulant and path graph models, spline-type graph
//! wavelet filterbanks, multiresolution transforms, spectral sampling with
//! Prony-type reconstruction, graph coarsening and graph product utilities.

pub mod coarsen;
mod dd;
pub mod error;
pub mod filterbank;
pub mod graph;
pub mod io;
pub mod laurent;
pub mod multires;
pub mod products;
pub mod sampling;
pub mod spectral;

pub use coarsen::{
    circulant_from_laplacian, is_circulant_matrix, kron_reduce, kron_reduce_graph, same_generating_set_coarsen,
    spectral_reduce, CoarseningResult, CoarseningScheme,
};
pub use error::{GfriError, Result};
pub use filterbank::{
    build_hcgeswt, build_hgeswt, build_hgswt, build_path_hgswt, check_invertibility,
    condition_number_bipartite, half_shift_conflicts, synthesis_matrix, transform_matrix,
    DownsamplePattern, FilterBank, FilterBankKind, FilterBankSpec, Verdict,
};
pub use io::{
    filterbank_json, fmt_float, graph_json, parse_graph_json, read_coefficients_csv,
    read_matrix_csv, read_samples_csv, read_signal_csv, read_sparse_csv, tol_from_env,
    write_coefficients_csv, write_matrix_csv, write_samples_csv, write_signal_csv,
    write_sparse_csv, GraphDescription,
};
pub use graph::{
    apply_circulant_filter, border_indices, CirculantGraph, GraphSignal, PathGraph,
    RepresenterPolynomial, C64,
};
pub use laurent::SymLaurent;
pub use multires::{
    analyze, plan_mrt, predicted_sparsity, synthesize, MultilevelPlan, PlanLevel,
    SparsityPrediction, SparsityVariant, WaveletCoefficients,
};
pub use products::{
    graph_product, multidim_sample_reconstruct, nearest_circulant, nearest_kronecker_circulant,
    separable_gwt, separable_igwt, tensor_decompose, KroneckerApproximation, ProductGraph,
    ProductKind, TensorSignal,
};
pub use sampling::{
    factorize_gft, factorization_residual, max_levels, prony_dct_reconstruct, prony_reconstruct,
    sample_dct, sample_gft, sample_via_pipeline, GftFactorization, SparseSignal, SpectralSamples,
};
pub use spectral::{
    dct_basis, dct_matrix, dft_basis, dft_matrix, dft_rows, gft_permutation, spectral_downsample,
    BasisKind, SpectrumInfo, UnitaryBasis,
};
