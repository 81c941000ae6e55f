macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $name() {
            $name::run_example();
        }
    };
}

example!(worked_example, "worked_example.rs");
example!(decompose, "decompose.rs");
example!(sparse_form, "sparse_form.rs");
example!(pencil, "pencil.rs");
example!(float_path, "float_path.rs");
example!(verify, "verify.rs");
