//! Output rendering for final values.

use lambdadl::Value;

/// Render a value for display. Non-empty lists print with a bare `nil`
/// tail (`cons machineGun nil`) since the element type is evident; a
/// standalone empty list keeps its annotation.
pub fn value(v: &Value) -> String {
    match v.list_items() {
        Some(items) if !items.is_empty() => {
            let mut out = String::new();
            render_list(&items, &mut out);
            out
        }
        _ => v.to_string(),
    }
}

fn render_list(items: &[&Value], out: &mut String) {
    if items.is_empty() {
        out.push_str("nil");
        return;
    }
    out.push_str("cons ");
    atom(items[0], out);
    out.push(' ');
    if items.len() == 1 {
        out.push_str("nil");
    } else {
        out.push('(');
        render_list(&items[1..], out);
        out.push(')');
    }
}

fn atom(v: &Value, out: &mut String) {
    match v {
        Value::Cons(..) | Value::Closure { .. } => {
            out.push('(');
            out.push_str(&value(v));
            out.push(')');
        }
        _ => out.push_str(&value(v)),
    }
}
