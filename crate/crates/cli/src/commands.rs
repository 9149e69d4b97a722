use std::fs;
use std::path::Path;

use combridge::bridgeio::{
    compress_bridge, compression_stats, read_relation_csv, read_universe_manifest,
    verify_lossless, write_relation_csv, write_universe_manifest, ClassicBridge,
    CompressedBridge, CompressionReport, Mode, SchemaHint,
};
use combridge::operators::{
    rank_inverse_join, rank_join_direct, rank_join_grouped, Integrity, RankColumnRef, GROUP_PK,
    GROUP_RANK, ITEM_PK,
};
use combridge::relmodel::{build_universe, natural_join, project, ItemUniverse, Relation, Schema, ValueType};
use combridge::synth::{generate, SynthConfig};
use combridge::Error;

use crate::Command;

const MAX_N_VAR: &str = "COMBRIDGE_MAX_N";
const DEFAULT_MAX_N: usize = 1_000_000;

/// Exit status and the diagnostic printed for it.
#[derive(Debug)]
pub struct Failure {
    pub exit_code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let exit_code = if err.is_format_error() { 2 } else { 1 };
        let message = match &err {
            Error::Divergence(msg) => format!("verification failed: first divergence: {msg}"),
            Error::EmptyBridge | Error::EmptyUniverse => {
                format!("{err} (empty-universe or empty bridge)")
            }
            _ => err.to_string(),
        };
        Failure { exit_code, message }
    }
}

type CmdResult = Result<(), Failure>;

fn max_n() -> Result<usize, Failure> {
    match std::env::var(MAX_N_VAR) {
        Err(_) => Ok(DEFAULT_MAX_N),
        Ok(v) => v.trim().parse().map_err(|_| Failure {
            exit_code: 2,
            message: format!("{MAX_N_VAR}={v} is not a non-negative integer"),
        }),
    }
}

fn guard_size(n: usize) -> Result<(), Failure> {
    let limit = max_n()?;
    if n > limit {
        return Err(Error::UniverseTooLarge { n, limit }.into());
    }
    Ok(())
}

fn read_items(path: &Path, item_key: &str) -> Result<(Relation, ItemUniverse), Failure> {
    let items = read_relation_csv(path, &SchemaHint::new().with_key(&[item_key]))?;
    guard_size(items.len())?;
    let universe = build_universe(&items, item_key)?;
    Ok((items, universe))
}

fn item_type(items: &Relation, item_key: &str) -> Result<ValueType, Failure> {
    Ok(items.schema().type_of(item_key)?)
}

fn read_bridge(path: &Path, item_ty: ValueType) -> Result<ClassicBridge, Failure> {
    let hint = SchemaHint::new()
        .with_type(ITEM_PK, item_ty)
        .with_key(&[GROUP_PK, ITEM_PK]);
    Ok(ClassicBridge::new(read_relation_csv(path, &hint)?)?)
}

fn read_groups(path: &Path, group_ty: ValueType) -> Result<Relation, Failure> {
    let hint = SchemaHint::new()
        .with_type(GROUP_PK, group_ty)
        .with_type(GROUP_RANK, ValueType::Group)
        .with_key(&[GROUP_PK]);
    Ok(read_relation_csv(path, &hint)?)
}

fn read_compressed_relation(path: &Path, group_ty: Option<ValueType>) -> Result<Relation, Failure> {
    let mut hint = SchemaHint::new().with_type(GROUP_RANK, ValueType::Group);
    if let Some(ty) = group_ty {
        hint = hint.with_type(GROUP_PK, ty);
    }
    Ok(read_relation_csv(path, &hint)?)
}

/// Loads a compressed bridge; the presence of `Group_PK` selects grouped
/// mode.
fn load_compressed(
    path: &Path,
    sidecar: Option<&Path>,
    group_ty: Option<ValueType>,
    version: &str,
) -> Result<CompressedBridge, Failure> {
    let rows = read_compressed_relation(path, group_ty)?;
    if rows.schema().contains(GROUP_PK) {
        return Ok(CompressedBridge::grouped(rows, version)?);
    }
    let corr = sidecar
        .map(|p| read_compressed_relation(p, group_ty))
        .transpose()?;
    Ok(CompressedBridge::direct(rows, corr, version)?)
}

fn print_report(report: &CompressionReport) {
    print!("{report}");
    print!("{}", report.to_key_values());
}

/// `G_rankc` with columns ordered `(Group_PK, groupRank, <group attributes>)`.
fn grouped_output(groups: &Relation, correspondence: &Relation) -> Result<Relation, Failure> {
    let joined = natural_join(groups, correspondence)?;
    let mut order = vec![GROUP_PK, GROUP_RANK];
    order.extend(groups.schema().names().filter(|n| *n != GROUP_PK));
    let projected = project(&joined, &order)?;
    let schema = Schema::new(
        projected
            .schema()
            .attributes()
            .iter()
            .map(|a| (a.name.clone(), a.ty))
            .collect(),
        &[GROUP_PK],
    )?;
    Ok(Relation::from_rows(schema, projected.rows().map(<[_]>::to_vec))?)
}

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Compress {
            items,
            bridge,
            groups,
            mode,
            integrity,
            item_key,
            out_universe,
            out,
            out_sidecar,
        } => {
            let (_, universe) = read_items(&items, &item_key)?;
            let classic = read_bridge(&bridge, universe.key_type())?;
            let classic = match integrity.integrity() {
                Integrity::Strict => classic,
                Integrity::Permissive => {
                    let (kept, dropped) = classic.retain_known_items(&universe)?;
                    if dropped > 0 {
                        eprintln!("warning: dropped {dropped} bridge row(s) with unknown items");
                    }
                    kept
                }
            };
            let compressed = compress_bridge(&classic, &universe, mode)?;
            let report = compression_stats(&classic, &compressed);
            write_universe_manifest(&universe, &out_universe)?;
            match mode {
                Mode::Grouped => {
                    let corr = compressed.relation();
                    let rows = match &groups {
                        Some(path) => {
                            let group_ty = corr.schema().type_of(GROUP_PK)?;
                            let g = read_groups(path, group_ty)?;
                            if integrity.integrity() == Integrity::Strict {
                                let known: std::collections::BTreeSet<_> = g.column(GROUP_PK)?.collect();
                                if let Some(missing) = corr.column(GROUP_PK)?.find(|v| !known.contains(v)) {
                                    return Err(Error::ReferentialViolation(format!(
                                        "bridge group {missing} is not in {}",
                                        path.display()
                                    ))
                                    .into());
                                }
                            }
                            grouped_output(&g, corr)?
                        }
                        None => corr.clone(),
                    };
                    write_relation_csv(&rows, &out)?;
                }
                Mode::Direct => {
                    write_relation_csv(compressed.relation(), &out)?;
                    if let Some(path) = &out_sidecar {
                        let corr = compressed.correspondence().expect("direct compression keeps sidecar")?;
                        write_relation_csv(&corr, path)?;
                    }
                }
            }
            print_report(&report);
            Ok(())
        }

        Command::Expand {
            compressed,
            universe,
            column,
            item_key,
            out,
        } => {
            let universe = read_universe_manifest(&universe, &item_key, None)?;
            guard_size(universe.n() as usize)?;
            let is_empty = fs::metadata(&compressed)
                .map_err(|e| Error::Io { path: compressed.clone(), source: e })?
                .len()
                == 0;
            let rows = if is_empty {
                Relation::new(Schema::new(vec![(column.as_str(), ValueType::Group)], &[])?)
            } else {
                let hint = SchemaHint::new().with_type(column.as_str(), ValueType::Group);
                read_relation_csv(&compressed, &hint)?
            };
            let expanded = rank_inverse_join(&RankColumnRef::new(&rows, &column)?, &universe)?;
            write_relation_csv(&expanded, &out)?;
            eprintln!("expanded {} key row(s) into {} item row(s)", rows.len(), expanded.len());
            Ok(())
        }

        Command::Join {
            groups,
            items,
            universe,
            mode,
            column,
            item_key,
            integrity,
            out,
        } => {
            let items = read_relation_csv(&items, &SchemaHint::new().with_key(&[&item_key]))?;
            let key_ty = item_type(&items, &item_key)?;
            let universe = read_universe_manifest(&universe, &item_key, Some(key_ty))?;
            guard_size(universe.n() as usize)?;
            let integrity = integrity.integrity();
            if integrity == Integrity::Strict {
                let from_items = build_universe(&items, &item_key)?;
                if from_items.version() != universe.version() {
                    return Err(Error::StaleUniverse {
                        expected: universe.version().to_string(),
                        found: from_items.version().to_string(),
                    }
                    .into());
                }
            }
            let hint = SchemaHint::new().with_type(column.as_str(), ValueType::Group);
            let compressed = read_relation_csv(&groups, &hint)?;
            let result = match mode {
                Mode::Grouped => rank_join_grouped(&compressed, &items, &column, &universe, integrity)?,
                Mode::Direct => rank_join_direct(&compressed, &items, &column, &universe, integrity)?,
            };
            write_relation_csv(&result, &out)?;
            eprintln!("rank-join produced {} row(s)", result.len());
            Ok(())
        }

        Command::Stats {
            bridge,
            compressed,
            sidecar,
            group_count,
            bridge_rows,
        } => {
            let report = match (bridge, compressed, group_count, bridge_rows) {
                (Some(bridge), Some(compressed), _, _) => {
                    let classic = ClassicBridge::new(read_relation_csv(
                        &bridge,
                        &SchemaHint::new().with_key(&[GROUP_PK, ITEM_PK]),
                    )?)?;
                    let group_ty = classic.relation().schema().type_of(GROUP_PK)?;
                    let c = load_compressed(&compressed, sidecar.as_deref(), Some(group_ty), "")?;
                    compression_stats(&classic, &c)
                }
                (_, _, Some(groups), Some(rows)) => CompressionReport::from_counts(groups, rows),
                _ => {
                    return Err(Failure {
                        exit_code: 2,
                        message: "stats needs --bridge and --compressed, or --group-count and --bridge-rows".into(),
                    })
                }
            };
            print_report(&report);
            Ok(())
        }

        Command::Verify {
            items,
            bridge,
            groups,
            compressed,
            sidecar,
            universe,
            item_key,
        } => {
            let (items, built) = read_items(&items, &item_key)?;
            if let Some(path) = &universe {
                let stored = read_universe_manifest(path, &item_key, Some(built.key_type()))?;
                if stored.version() != built.version() {
                    return Err(Error::StaleUniverse {
                        expected: stored.version().to_string(),
                        found: built.version().to_string(),
                    }
                    .into());
                }
            }
            let classic = read_bridge(&bridge, built.key_type())?;
            let group_ty = classic.relation().schema().type_of(GROUP_PK)?;
            let g = match &groups {
                Some(path) => read_groups(path, group_ty)?,
                None => project(classic.relation(), &[GROUP_PK])?,
            };
            let loaded = compressed
                .as_deref()
                .map(|p| load_compressed(p, sidecar.as_deref(), Some(group_ty), built.version()))
                .transpose()?;
            let report = verify_lossless(&g, &classic, &items, &built, loaded.as_ref())?;
            println!(
                "verify ok: groups={} bridge_rows={} grouped_join_rows={} direct_join_rows={}",
                report.groups, report.bridge_rows, report.grouped_join_rows, report.direct_join_rows
            );
            Ok(())
        }

        Command::Gen {
            seed,
            scale,
            n,
            out_items,
            out_bridge,
            out_groups,
        } => {
            guard_size(n as usize)?;
            let data = generate(&SynthConfig {
                seed,
                scale,
                items: n,
                ..SynthConfig::default()
            })?;
            write_relation_csv(&data.items, &out_items)?;
            write_relation_csv(data.bridge.relation(), &out_bridge)?;
            if let Some(path) = &out_groups {
                write_relation_csv(&data.groups, path)?;
            }
            eprintln!(
                "generated {} groups, {} bridge rows over {} items",
                data.groups.len(),
                data.bridge.len(),
                data.items.len()
            );
            Ok(())
        }
    }
}
