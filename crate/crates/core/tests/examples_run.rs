//! Every example must run to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                let _ = main();
            }
        }
    };
}

example!(validate_and_sample);
example!(naimark_dilation);
example!(extremality_and_decomposition);
example!(informational_completeness);
example!(phase_space_q_function);
example!(characteristic_zero_scan);
example!(number_state_decomposition);
example!(discretized_husimi_povm);
example!(cyclic_covariant);
