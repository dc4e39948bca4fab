//! Table-driven flag parsing with an optional `key = value` config file.
//! Flags override config values; unknown keys are rejected; `--dump-config`
//! prints the fully resolved parameter bag for reproducibility.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy)]
pub struct Opt {
    pub name: &'static str,
    /// false: boolean switch; true: expects one value.
    pub takes_value: bool,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub struct Schema {
    pub command: &'static str,
    pub about: &'static str,
    pub opts: &'static [Opt],
}

pub enum Parsed {
    /// Help or dump-config was printed; caller exits 0.
    Done,
    Values(Values),
}

pub struct Values {
    map: BTreeMap<String, String>,
}

impl Schema {
    fn find(&self, name: &str) -> Option<&Opt> {
        self.opts.iter().find(|o| o.name == name)
    }

    pub fn help_text(&self) -> String {
        let mut out = format!("ilm {} — {}\n\noptions:\n", self.command, self.about);
        for opt in self.opts {
            let value = if opt.takes_value { " <value>" } else { "" };
            let default = match opt.default {
                Some(d) => format!(" [default: {d}]"),
                None => String::new(),
            };
            out.push_str(&format!(
                "  --{}{}\n      {}{}\n",
                opt.name, value, opt.help, default
            ));
        }
        out.push_str(
            "  --config <file>\n      read key = value defaults from a file\n  --dump-config\n      print the resolved configuration and exit\n  --help\n      print this message\n",
        );
        out
    }

    /// Parse argv (after the subcommand) against this schema.
    pub fn parse(&self, args: &[String]) -> Result<Parsed, UsageError> {
        // First pass: find --help and --config.
        let mut config_file: Option<String> = None;
        let mut dump = false;
        let mut i = 0;
        while i < args.len() {
            match args[i].as_str() {
                "--help" | "-h" => {
                    print!("{}", self.help_text());
                    return Ok(Parsed::Done);
                }
                "--config" => {
                    let value = args
                        .get(i + 1)
                        .ok_or_else(|| UsageError(String::from("--config needs a file path")))?;
                    config_file = Some(value.clone());
                    i += 2;
                }
                "--dump-config" => {
                    dump = true;
                    i += 1;
                }
                _ => i += 1,
            }
        }

        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for opt in self.opts {
            if let Some(d) = opt.default {
                map.insert(opt.name.to_string(), d.to_string());
            }
        }

        // Config file layer.
        if let Some(path) = &config_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {path}: {e}")))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    UsageError(format!("{path}:{}: expected key = value", lineno + 1))
                })?;
                let key = key.trim();
                let value = value.trim();
                let opt = self.find(key).ok_or_else(|| {
                    UsageError(format!("{path}:{}: unknown key {key:?}", lineno + 1))
                })?;
                if opt.takes_value {
                    map.insert(key.to_string(), value.to_string());
                } else {
                    let truthy = matches!(value, "true" | "1" | "yes");
                    if truthy {
                        map.insert(key.to_string(), String::from("true"));
                    }
                }
            }
        }

        // Command line layer.
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            if arg == "--config" {
                i += 2;
                continue;
            }
            if arg == "--dump-config" {
                i += 1;
                continue;
            }
            let stripped = arg
                .strip_prefix("--")
                .ok_or_else(|| UsageError(format!("unexpected argument {arg:?}")))?;
            let (name, inline_value) = match stripped.split_once('=') {
                Some((n, v)) => (n, Some(v.to_string())),
                None => (stripped, None),
            };
            let opt = self
                .find(name)
                .ok_or_else(|| UsageError(format!("unknown option --{name}")))?;
            if opt.takes_value {
                let value = match inline_value {
                    Some(v) => v,
                    None => {
                        i += 1;
                        args.get(i)
                            .cloned()
                            .ok_or_else(|| UsageError(format!("--{name} needs a value")))?
                    }
                };
                map.insert(name.to_string(), value);
            } else {
                if inline_value.is_some() {
                    return Err(UsageError(format!("--{name} does not take a value")));
                }
                map.insert(name.to_string(), String::from("true"));
            }
            i += 1;
        }

        if dump {
            for opt in self.opts {
                let value = map.get(opt.name).cloned().unwrap_or_default();
                println!("{} = {}", opt.name, value);
            }
            return Ok(Parsed::Done);
        }

        Ok(Parsed::Values(Values { map }))
    }
}

impl Values {
    pub fn str_opt(&self, name: &str) -> Option<&str> {
        self.map.get(name).map(String::as_str)
    }

    pub fn require_str(&self, name: &str) -> Result<&str, UsageError> {
        self.str_opt(name)
            .ok_or_else(|| UsageError(format!("missing required option --{name}")))
    }

    pub fn f64(&self, name: &str) -> Result<f64, UsageError> {
        self.require_str(name)?
            .parse()
            .map_err(|_| UsageError(format!("--{name} expects a number")))
    }

    pub fn f64_opt(&self, name: &str) -> Result<Option<f64>, UsageError> {
        match self.str_opt(name) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| UsageError(format!("--{name} expects a number"))),
        }
    }

    pub fn u32(&self, name: &str) -> Result<u32, UsageError> {
        self.require_str(name)?
            .parse()
            .map_err(|_| UsageError(format!("--{name} expects an integer")))
    }

    pub fn usize(&self, name: &str) -> Result<usize, UsageError> {
        self.require_str(name)?
            .parse()
            .map_err(|_| UsageError(format!("--{name} expects an integer")))
    }

    pub fn u64(&self, name: &str) -> Result<u64, UsageError> {
        self.require_str(name)?
            .parse()
            .map_err(|_| UsageError(format!("--{name} expects an integer")))
    }

    pub fn flag(&self, name: &str) -> bool {
        self.map.get(name).map(String::as_str) == Some("true")
    }

}
