use cbindgen::{Config, EnumConfig, Language, RenameRule, Style};

fn main() {
    let crate_dir =
        std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR env var not set");
    println!("cargo:rerun-if-changed=src");
    let config = Config {
        language: Language::C,
        style: Style::Both,
        include_guard: Some("DISLAC_H".into()),
        usize_is_size_t: true,
        documentation: true,
        enumeration: EnumConfig {
            prefix_with_name: true,
            rename_variants: RenameRule::ScreamingSnakeCase,
            ..EnumConfig::default()
        },
        ..Config::default()
    };
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("failed to generate C bindings")
        .write_to_file(format!("{crate_dir}/include/dislac.h"));
}
