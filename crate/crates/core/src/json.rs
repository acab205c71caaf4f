//! JSON encodings of games, utilities and strategies.
//!
//! Game: `{"players": n, "objectives": d, "actions": [[labels]..],
//! "payoffs": [a_1][a_2]..[player][objective]}`.
//! Correlated strategy: nested probability array indexed `[a_1][a_2]..`.
//! Strategy profile: one probability list per player.
//! Utilities: a list of `{"variant": .., "nonneg_guard": ..}` objects.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::game::{CorrelatedStrategy, Monfg, StrategyProfile};
use crate::{Error, Result, UtilitySpec};

fn nest(flat: &[Value], shape: &[usize]) -> Value {
    match shape {
        [] => flat[0].clone(),
        [_] => Value::Array(flat.to_vec()),
        [first, rest @ ..] => {
            let chunk = flat.len() / first;
            Value::Array(flat.chunks(chunk).map(|c| nest(c, rest)).collect())
        }
    }
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn game_to_value(game: &Monfg) -> Value {
    let n = game.num_players();
    let d = game.num_objectives();
    let flat: Vec<Value> = game.raw_payoffs().iter().map(|&x| number(x)).collect();
    let mut shape = game.action_counts();
    shape.push(n);
    shape.push(d);
    json!({
        "players": n,
        "objectives": d,
        "actions": game.action_labels(),
        "payoffs": nest(&flat, &shape),
    })
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::parse(name, "missing field"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(path, "expected a non-negative integer"))
}

/// Walks a nested array of the given shape and returns its leaves row-major.
fn flatten_numbers(v: &Value, shape: &[usize], path: &str) -> Result<Vec<f64>> {
    fn walk(v: &Value, shape: &[usize], path: &str, out: &mut Vec<f64>) -> Result<()> {
        match shape.split_first() {
            None => {
                out.push(v.as_f64().ok_or_else(|| Error::parse(path, "expected a number"))?);
                Ok(())
            }
            Some((&len, rest)) => {
                let arr = v.as_array().ok_or_else(|| Error::parse(path, "expected an array"))?;
                if arr.len() != len {
                    return Err(Error::parse(
                        path,
                        format!("expected {len} entries, found {}", arr.len()),
                    ));
                }
                for (i, item) in arr.iter().enumerate() {
                    walk(item, rest, &format!("{path}[{i}]"), out)?;
                }
                Ok(())
            }
        }
    }
    let mut out = Vec::with_capacity(shape.iter().product());
    walk(v, shape, path, &mut out)?;
    Ok(out)
}

pub fn game_from_value(v: &Value) -> Result<Monfg> {
    if !v.is_object() {
        return Err(Error::parse("game", "expected a JSON object"));
    }
    let n = as_usize(field(v, "players")?, "players")?;
    let d = as_usize(field(v, "objectives")?, "objectives")?;
    let actions = field(v, "actions")?
        .as_array()
        .ok_or_else(|| Error::parse("actions", "expected an array of label lists"))?;
    if actions.len() != n {
        return Err(Error::parse(
            "actions",
            format!("{} label lists for {n} players", actions.len()),
        ));
    }
    let mut labels = Vec::with_capacity(n);
    for (i, list) in actions.iter().enumerate() {
        let list = list
            .as_array()
            .ok_or_else(|| Error::parse(format!("actions[{i}]"), "expected an array of labels"))?;
        let row = list
            .iter()
            .enumerate()
            .map(|(k, s)| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::parse(format!("actions[{i}][{k}]"), "expected a string"))
            })
            .collect::<Result<Vec<_>>>()?;
        labels.push(row);
    }
    let mut shape: Vec<usize> = labels.iter().map(Vec::len).collect();
    shape.push(n);
    shape.push(d);
    let payoffs = flatten_numbers(field(v, "payoffs")?, &shape, "payoffs")?;
    Monfg::new(labels, d, payoffs)
}

pub fn correlated_to_value(sigma: &CorrelatedStrategy) -> Value {
    let flat: Vec<Value> = sigma.probs().iter().map(|&x| number(x)).collect();
    nest(&flat, sigma.shape())
}

/// Parses a nested probability array; the shape is read off the nesting.
pub fn correlated_from_value(v: &Value) -> Result<CorrelatedStrategy> {
    let mut shape = Vec::new();
    let mut cur = v;
    while let Some(arr) = cur.as_array() {
        if arr.is_empty() {
            return Err(Error::parse("correlated strategy", "empty array"));
        }
        shape.push(arr.len());
        cur = &arr[0];
    }
    if shape.is_empty() {
        return Err(Error::parse("correlated strategy", "expected a nested array"));
    }
    let probs = flatten_numbers(v, &shape, "correlated strategy")?;
    CorrelatedStrategy::new(shape, probs)
}

pub fn profile_from_value(v: &Value) -> Result<StrategyProfile> {
    serde_json::from_value(v.clone()).map_err(|e| Error::parse("strategy profile", e.to_string()))
}

pub fn utilities_from_value(v: &Value) -> Result<Vec<UtilitySpec>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::parse("utilities", "expected an array with one utility per player"))?;
    arr.iter()
        .enumerate()
        .map(|(i, u)| {
            serde_json::from_value(u.clone()).map_err(|e| Error::parse(format!("utilities[{i}]"), e.to_string()))
        })
        .collect()
}

impl Serialize for Monfg {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        game_to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Monfg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        game_from_value(&v).map_err(D::Error::custom)
    }
}

impl Serialize for CorrelatedStrategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        correlated_to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CorrelatedStrategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        correlated_from_value(&v).map_err(D::Error::custom)
    }
}
