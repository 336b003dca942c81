//! Synthetic Camunda 7 models for benchmarks.

use std::fmt::Write as _;

/// A process with `tasks` service tasks in a chain, each with a
/// delegate expression, a conditional flow and a DI shape.
pub fn synthetic_model(tasks: usize) -> String {
    let mut process = String::new();
    let mut di = String::new();
    let _ = writeln!(process, r#"    <bpmn:startEvent id="Start" camunda:asyncBefore="true" />"#);
    let mut previous = "Start".to_string();
    for i in 0..tasks {
        let id = format!("Task_{i}");
        let _ = writeln!(
            process,
            r#"    <bpmn:serviceTask id="{id}" camunda:delegateExpression="${{worker{i}}}" />
    <bpmn:sequenceFlow id="Flow_{i}" sourceRef="{previous}" targetRef="{id}">
      <bpmn:conditionExpression xsi:type="bpmn:tFormalExpression">${{count &gt; {i} &amp;&amp; ready}}</bpmn:conditionExpression>
    </bpmn:sequenceFlow>"#
        );
        let _ = writeln!(
            di,
            r#"      <bpmndi:BPMNShape id="{id}_di" bpmnElement="{id}">
        <dc:Bounds x="{}" y="100" width="100" height="80" />
      </bpmndi:BPMNShape>"#,
            150 + i * 150
        );
        previous = id;
    }
    let _ = writeln!(process, r#"    <bpmn:endEvent id="End" />"#);
    let _ = writeln!(
        process,
        r#"    <bpmn:sequenceFlow id="Flow_end" sourceRef="{previous}" targetRef="End" />"#
    );
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<bpmn:definitions xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL" xmlns:bpmndi="http://www.omg.org/spec/BPMN/20100524/DI" xmlns:dc="http://www.omg.org/spec/DD/20100524/DC" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xmlns:camunda="http://camunda.org/schema/1.0/bpmn" id="Definitions_bench" targetNamespace="http://bpmn.io/schema/bpmn">
  <bpmn:process id="Bench" isExecutable="true">
{process}  </bpmn:process>
  <bpmndi:BPMNDiagram id="Diagram">
    <bpmndi:BPMNPlane id="Plane" bpmnElement="Bench">
{di}    </bpmndi:BPMNPlane>
  </bpmndi:BPMNDiagram>
</bpmn:definitions>
"#
    )
}
