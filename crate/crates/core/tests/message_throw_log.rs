mod common;

use common::{check_bracketing, message_throw_window, split_prefix, EXPECTED_THROW_LOG};

#[test]
fn message_throw_event_log_matches() {
    assert_eq!(message_throw_window().unwrap(), EXPECTED_THROW_LOG);
}

#[test]
fn throw_log_has_one_todo_and_two_optional_todos() {
    let window = message_throw_window().unwrap();
    let kinds: Vec<_> = window.iter().map(|l| split_prefix(l).unwrap().0).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "TODO: ").count(), 1);
    assert_eq!(kinds.iter().filter(|k| **k == "TODO (OPTIONAL): ").count(), 2);
    check_bracketing(&window).unwrap();
}

#[test]
fn throw_log_check_passes() {
    common::check_message_throw_log().unwrap();
}
