#!/usr/bin/env python3
"""Regenerate the bundled catalogs and queries under src/archforge/data/.

All numeric parameters here (prices, core counts, buffer depths, ordering
edges not taken verbatim from published material) are authored for this
inventory and marked provenance=authored on hardware entries.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from archforge.dsl import (
    Allocate,
    AllocationScope as Scope,
    And,
    Cmp,
    CmpOp,
    CoLocatedHasProperty,
    CountDeployedDevices,
    DeviceAttr,
    ForAllDeployedDevices,
    Implies,
    Lit,
    Mul,
    Not,
    Or,
    SystemDeployed,
    WorkloadHasProperty,
    WorkloadScalar,
)
from archforge.documents import catalog_to_json, query_to_json, write_document
from archforge.model import (
    ArchitectConstraint,
    Catalog,
    DeviceGroup,
    DeviceSlot,
    HardwareSchema,
    HardwareSpec,
    ObjectiveSpec,
    OptimizeDirective,
    OrderingSpec,
    PerformanceBound,
    Query,
    RoleSpec,
    SchemaEntry,
    SystemSpec,
    SystemWarning,
    WorkloadSpec,
    validate_catalog,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "archforge" / "data"


def entry(kind, default=None):
    return SchemaEntry(kind=kind, default=default)


def forall(device_type, binder, body):
    return ForAllDeployedDevices(device_type, binder, body)


def battr(binder, name):
    # boolean entries act as formulas directly (the has-flag idiom)
    return DeviceAttr(binder, name)


def gt(binder, name, value):
    return Cmp(CmpOp.GT, DeviceAttr(binder, name), Lit(value))


def ge(binder, name, value):
    return Cmp(CmpOp.GE, DeviceAttr(binder, name), Lit(value))


def better(objective, subject, obj):
    return OrderingSpec(objective, subject, "BETTER_THAN", obj)


def same(objective, subject, obj):
    return OrderingSpec(objective, subject, "SAME_AS", obj)


# --------------------------------------------------------------------------
# datacenter catalog
# --------------------------------------------------------------------------


def dc_catalog() -> Catalog:
    schemas = {
        "dc.compute": HardwareSchema(
            "dc.compute",
            "COMPUTE",
            {
                "cost": entry("REAL"),
                "cores": entry("EXHAUSTIBLE"),
                "RDMA": entry("BOOL", False),
                "NIC_Reorder_Buffer": entry("REAL", 10),
                "NIC_TIMESTAMPS": entry("BOOL", False),
                "FPGA_SmartNIC": entry("BOOL", False),
                "ARM_SmartNIC": entry("BOOL", False),
            },
        ),
        "dc.switch": HardwareSchema(
            "dc.switch",
            "SWITCH",
            {
                "cost": entry("REAL"),
                "QOS_Levels": entry("EXHAUSTIBLE", 1),
                "ECN": entry("BOOL", False),
                "QCN": entry("BOOL", False),
                "PFC": entry("BOOL", False),
                "INT": entry("BOOL", False),
                "programmable": entry("BOOL", False),
                "buffer_mb": entry("REAL", 12),
                "rack_units": entry("REAL", 1),
                "line_cards": entry("REAL", 1),
                "cross_section_bandwidth": entry("REAL", 2048),
            },
        ),
        "dc.router": HardwareSchema(
            "dc.router",
            "ROUTER",
            {
                "cost": entry("REAL"),
                "programmable": entry("BOOL", False),
                "port_bandwidth": entry("REAL", 400),
            },
        ),
        "dc.link": HardwareSchema(
            "dc.link",
            "LINK",
            {
                "cost": entry("REAL"),
                "bandwidth": entry("EXHAUSTIBLE"),
                "port_bandwidth": entry("REAL"),
            },
        ),
    }

    def hw(hid, schema, **values):
        return HardwareSpec(hid, schema, values, provenance="authored")

    hardware = {
        h.id: h
        for h in [
            hw("c220g1_16c", "dc.compute", cost=700.0, cores=16),
            hw("cx4_32c_rdma", "dc.compute", cost=1500.0, cores=32, RDMA=True),
            hw(
                "cx5_64c_rdma",
                "dc.compute",
                cost=3000.0,
                cores=64,
                RDMA=True,
                NIC_Reorder_Buffer=20.0,
                NIC_TIMESTAMPS=True,
            ),
            hw(
                "d6515_96c",
                "dc.compute",
                cost=4200.0,
                cores=96,
                NIC_Reorder_Buffer=32.0,
                NIC_TIMESTAMPS=True,
                FPGA_SmartNIC=True,
            ),
            hw(
                "xl170_32c",
                "dc.compute",
                cost=1200.0,
                cores=32,
                NIC_Reorder_Buffer=32.0,
                NIC_TIMESTAMPS=True,
            ),
            hw(
                "asr9006",
                "dc.switch",
                cost=6000.0,
                QOS_Levels=4,
                ECN=True,
                INT=True,
                buffer_mb=16.0,
                rack_units=10.0,
                line_cards=4.0,
                cross_section_bandwidth=16384.0,
            ),
            hw(
                "broadcom_td3",
                "dc.switch",
                cost=4000.0,
                QOS_Levels=8,
                ECN=True,
                PFC=True,
                buffer_mb=32.0,
            ),
            hw("dell_s4810", "dc.switch", cost=1000.0, QOS_Levels=2, buffer_mb=4.0),
            hw(
                "tofino1",
                "dc.switch",
                cost=9000.0,
                QOS_Levels=8,
                ECN=True,
                PFC=True,
                INT=True,
                programmable=True,
                buffer_mb=22.0,
            ),
            hw("asr1k_router", "dc.router", cost=5000.0),
            hw("tofino_router", "dc.router", cost=8000.0, programmable=True),
            hw("ether_040g", "dc.link", cost=100.0, bandwidth=40, port_bandwidth=40.0),
            hw("ether_080g", "dc.link", cost=180.0, bandwidth=80, port_bandwidth=80.0),
            hw("ether_100g", "dc.link", cost=250.0, bandwidth=100, port_bandwidth=100.0),
        ]
    }

    objectives = {
        o.id: o
        for o in [
            ObjectiveSpec("latency", ("cpu_scheduling",)),
            ObjectiveSpec("throughput"),
            ObjectiveSpec("ease_of_deployment"),
            ObjectiveSpec("monitoring", ("capture_delays", "detect_queue_length")),
            ObjectiveSpec("load_balancing"),
            ObjectiveSpec("fairness", ("per-flow", "per-application", "per-tenant")),
            ObjectiveSpec("app_modification"),
        ]
    }

    dc = WorkloadHasProperty("dc_flows", label="workload drives datacenter flows")
    roles = {
        r.id: r
        for r in [
            RoleSpec("cca", dc),
            RoleSpec("transport", dc),
            RoleSpec("load_balancer", dc),
            RoleSpec("Monitor", dc),
            RoleSpec("virtual_switch", dc),
            RoleSpec(
                "cpu_sched",
                WorkloadHasProperty("incast", label="incast traffic wants tight host scheduling"),
            ),
            RoleSpec(
                "network_stack",
                WorkloadHasProperty(
                    "short_flows", label="short-flow workloads are stack-sensitive"
                ),
            ),
            RoleSpec(
                "scavenger_cca",
                WorkloadHasProperty("scavenger_flows"),
            ),
            RoleSpec(
                "WAN_DC_Competition",
                And(
                    (
                        WorkloadHasProperty("wan_flows"),
                        CoLocatedHasProperty("dc_flows"),
                    ),
                    label="WAN and DC flows compete on shared queues",
                ),
                warning="WAN-DC competition can cause high latency",
            ),
        ]
    }

    def system(sid, role, constraint, label, solves=(), warnings=(), roles_extra=()):
        return SystemSpec(
            sid,
            (role,) + tuple(roles_extra),
            tuple(solves),
            constraint.with_meta(node_id=f"{sid}.main"),
            tuple(warnings),
            {f"{sid}.main": label},
        )

    systems = {}
    for s in [
        # congestion control
        system(
            "DCTCP",
            "cca",
            forall("SWITCH", "s", battr("s", "ECN")),
            "DCTCP requires ECN marking support on every switch",
        ),
        system(
            "Timely",
            "cca",
            Allocate("QOS_Levels", Lit(1), Scope.PER_SYSTEM_GLOBAL, "SWITCH"),
            "Timely occupies one dedicated switch QoS level no matter how many hosts deploy it",
        ),
        system(
            "Swift",
            "cca",
            Lit(True),
            "Swift is delay-based and needs no special switch features",
        ),
        system(
            "DCQCN",
            "cca",
            And(
                (
                    SystemDeployed("RDMA"),
                    forall("SWITCH", "s", battr("s", "PFC")),
                    Allocate("QOS_Levels", Lit(1), Scope.PER_SYSTEM_GLOBAL, "SWITCH"),
                )
            ),
            "DCQCN runs on RoCE: it needs the RDMA transport, PFC switches, and a QoS level",
        ),
        system(
            "BFC",
            "cca",
            And(
                (
                    forall("SWITCH", "s", battr("s", "programmable")),
                    forall("LINK", "l", ge("l", "port_bandwidth", 100)),
                    Not(SystemDeployed("RDMA")),
                )
            ),
            "BFC needs programmable switches, 100Gbps-class links, and a non-RDMA transport",
        ),
        system(
            "Homa",
            "cca",
            forall("SWITCH", "s", ge("s", "QOS_Levels", 2)),
            "Homa wants several switch priority levels available",
        ),
        system("Cubic", "cca", Lit(True), "Cubic is the kernel default; no requirements"),
        system("BBR", "cca", Lit(True), "BBR paces from the host; no switch support needed"),
        system("Vegas", "cca", Lit(True), "Vegas is delay-based and host-only"),
        system("Copa", "cca", Lit(True), "Copa is delay-based and host-only"),
        system(
            "LEDBAT",
            "scavenger_cca",
            And(
                (
                    Not(SystemDeployed("Vegas")),
                    Not(SystemDeployed("Copa")),
                    Implies(
                        Or((SystemDeployed("Cubic"), SystemDeployed("BBR"))),
                        forall("SWITCH", "s", ge("s", "buffer_mb", 16)),
                    ),
                )
            ),
            "LEDBAT coexists with loss-based senders only behind large switch buffers, "
            "and never with delay-based ones",
        ),
        # load balancing
        system("ECMP", "load_balancer", Lit(True), "ECMP hashes flows on existing switches"),
        system(
            "PLB",
            "load_balancer",
            Allocate("cores", Lit(1), Scope.PER_DEVICE, "COMPUTE"),
            "PLB repathes flows from hosts and costs a core per compute",
        ),
        system(
            "CONGA",
            "load_balancer",
            forall("SWITCH", "s", battr("s", "INT")),
            "CONGA needs in-network telemetry support in the fabric",
        ),
        system(
            "PacketSpray",
            "load_balancer",
            forall("COMPUTE", "c", gt("c", "NIC_Reorder_Buffer", 20)),
            "PacketSpray requires a NIC reorder buffer deeper than 20 packets on every compute",
        ),
        # monitoring
        system(
            "PingMesh",
            "Monitor",
            Allocate(
                "cores",
                Mul((Lit(8e-05), CountDeployedDevices("COMPUTE"))),
                Scope.PER_DEVICE,
                "COMPUTE",
            ),
            "PingMesh burns cores on each server proportional to the fleet it probes",
            solves=("monitoring.capture_delays",),
        ),
        system(
            "Simon",
            "Monitor",
            And(
                (
                    forall("COMPUTE", "c", battr("c", "NIC_TIMESTAMPS")),
                    Allocate(
                        "cores",
                        Mul((Lit(0.01), WorkloadScalar("num_flows"))),
                        Scope.PER_WORKLOAD_GLOBAL,
                        "COMPUTE",
                    ),
                )
            ),
            "Simon reconstructs queues from NIC timestamps and spends cores per flow",
            solves=("monitoring.capture_delays", "monitoring.detect_queue_length"),
            warnings=(
                SystemWarning(
                    Cmp(CmpOp.GT, WorkloadScalar("network_load"), Lit(40)),
                    "Simon does not have benchmarks beyond 40Gbps link speeds and it "
                    "is being deployed for that case",
                ),
            ),
        ),
        system(
            "Sonata",
            "Monitor",
            forall("SWITCH", "s", battr("s", "programmable")),
            "Sonata compiles telemetry queries into programmable switches",
            solves=("monitoring.capture_delays", "monitoring.detect_queue_length"),
        ),
        system(
            "Marple",
            "Monitor",
            forall("SWITCH", "s", battr("s", "programmable")),
            "Marple needs a programmable key-value store in the switch pipeline",
            solves=("monitoring.capture_delays", "monitoring.detect_queue_length"),
        ),
        # virtual switching
        system(
            "ANDROMEDA",
            "virtual_switch",
            Allocate(
                "cores",
                Mul((Lit(0.1), WorkloadScalar("peak_cores"))),
                Scope.PER_WORKLOAD_GLOBAL,
                "COMPUTE",
            ),
            "Andromeda's software datapath burns more CPU cores with more workload",
        ),
        system(
            "VFP",
            "virtual_switch",
            forall("COMPUTE", "c", battr("c", "FPGA_SmartNIC")),
            "VFP offloads the virtual switch to FPGA SmartNICs",
        ),
        system(
            "NITRO",
            "virtual_switch",
            forall("COMPUTE", "c", battr("c", "ARM_SmartNIC")),
            "Nitro needs its ARM offload card in every server",
        ),
        # transport
        system("TCP", "transport", Lit(True), "Kernel TCP runs anywhere"),
        system(
            "RDMA",
            "transport",
            forall("COMPUTE", "c", battr("c", "RDMA")),
            "RDMA requires every compute device to satisfy RDMA = True",
        ),
        system(
            "Pony",
            "transport",
            SystemDeployed("Snap"),
            "Pony Express rides on the Snap runtime",
        ),
        # network stacks
        system("Linux", "network_stack", Lit(True), "The stock kernel stack has no requirements"),
        system(
            "Snap",
            "network_stack",
            Allocate("cores", Lit(1), Scope.PER_DEVICE, "COMPUTE"),
            "Snap dedicates one core per server for its engine scheduling",
        ),
        system(
            "NetChannel",
            "network_stack",
            Allocate("cores", Lit(2), Scope.PER_WORKLOAD_GLOBAL, "COMPUTE"),
            "NetChannel pins its channel processing onto dedicated cores",
        ),
        system(
            "Demikernel",
            "network_stack",
            forall("COMPUTE", "c", battr("c", "RDMA")),
            "Demikernel's library OS datapath drives RDMA-capable NICs",
        ),
        # host scheduling
        system(
            "ZygOS",
            "cpu_sched",
            Allocate("cores", Lit(1), Scope.PER_DEVICE, "COMPUTE"),
            "ZygOS steals a core per host for microsecond-scale scheduling",
            solves=("latency.cpu_scheduling",),
        ),
    ]:
        systems[s.id] = s

    orderings = (
        # latency, congestion control
        better("latency", "BFC", "DCQCN"),
        better("latency", "DCQCN", "Swift"),
        better("latency", "Swift", "Homa"),
        better("latency", "Homa", "Timely"),
        better("latency", "Timely", "DCTCP"),
        better("latency", "DCTCP", "BBR"),
        better("latency", "BBR", "Cubic"),
        # latency, transport and stack
        better("latency", "RDMA", "Pony"),
        better("latency", "Pony", "TCP"),
        better("latency", "Demikernel", "NetChannel"),
        better("latency", "NetChannel", "Snap"),
        better("latency", "Snap", "Linux"),
        # latency, load balancing
        better("latency", "PacketSpray", "CONGA"),
        same("latency", "CONGA", "PLB"),
        better("latency", "CONGA", "ECMP"),
        # latency, monitoring overhead
        better("latency", "Sonata", "Simon"),
        better("latency", "Simon", "PingMesh"),
        better("latency", "Sonata", "Marple"),
        better("latency", "Marple", "PingMesh"),
        # the load-balancing quality axis
        better("load_balancing", "PacketSpray", "CONGA"),
        same("load_balancing", "CONGA", "PLB"),
        better("load_balancing", "PLB", "ECMP"),
        # throughput
        better("throughput", "PacketSpray", "CONGA"),
        same("throughput", "CONGA", "PLB"),
        better("throughput", "PLB", "ECMP"),
        better("throughput", "RDMA", "Pony"),
        better("throughput", "Pony", "TCP"),
        better("throughput", "DCQCN", "Swift"),
        better("throughput", "BFC", "Swift"),
        better("throughput", "Swift", "DCTCP"),
        better("throughput", "NetChannel", "Snap"),
        # ease of deployment
        better("ease_of_deployment", "PLB", "CONGA"),
        better("ease_of_deployment", "ECMP", "CONGA"),
        better("ease_of_deployment", "PacketSpray", "CONGA"),
        better("ease_of_deployment", "ECMP", "PacketSpray"),
        better("ease_of_deployment", "PingMesh", "Simon"),
        better("ease_of_deployment", "DCTCP", "DCQCN"),
        better("ease_of_deployment", "DCTCP", "BFC"),
        better("ease_of_deployment", "Swift", "DCQCN"),
        better("ease_of_deployment", "TCP", "RDMA"),
        better("ease_of_deployment", "TCP", "Pony"),
        better("ease_of_deployment", "ANDROMEDA", "VFP"),
        better("ease_of_deployment", "ANDROMEDA", "NITRO"),
        better("ease_of_deployment", "Linux", "Snap"),
        better("ease_of_deployment", "Linux", "NetChannel"),
        better("ease_of_deployment", "Linux", "Demikernel"),
        # monitoring fidelity
        better("monitoring", "Sonata", "Simon"),
        better("monitoring", "Simon", "PingMesh"),
        better("monitoring", "Sonata", "Marple"),
    )

    return Catalog(schemas, hardware, objectives, roles, systems, orderings)


# --------------------------------------------------------------------------
# cloud-native catalog
# --------------------------------------------------------------------------


def cloud_catalog() -> Catalog:
    schemas = {
        "cloud.node": HardwareSchema(
            "cloud.node",
            "NODE",
            {
                "cost": entry("REAL"),
                "cores": entry("EXHAUSTIBLE"),
                "kernel_ebpf": entry("BOOL", False),
            },
        )
    }

    def hw(hid, **values):
        return HardwareSpec(hid, "cloud.node", values, provenance="authored")

    hardware = {
        h.id: h
        for h in [
            hw("vm_small", cost=50.0, cores=8),
            hw("vm_large", cost=100.0, cores=16, kernel_ebpf=True),
        ]
    }

    objectives = {
        o.id: o
        for o in [
            ObjectiveSpec("latency"),
            ObjectiveSpec("ease_of_deployment"),
            ObjectiveSpec("scalability"),
        ]
    }

    micro = WorkloadHasProperty(
        "microservices", label="the workload is a microservice deployment"
    )
    roles = {
        r.id: r
        for r in [
            RoleSpec("runtime", micro),
            RoleSpec("orchestrator", micro),
            RoleSpec("autoscaler", micro),
            RoleSpec("mesh", micro),
            RoleSpec("rpc", WorkloadHasProperty("rpc_calls")),
        ]
    }

    def system(sid, role, constraint, label, solves=()):
        return SystemSpec(
            sid,
            (role,),
            tuple(solves),
            constraint.with_meta(node_id=f"{sid}.main"),
            (),
            {f"{sid}.main": label},
        )

    systems = {}
    for s in [
        system(
            "containerd",
            "runtime",
            Lit(True),
            "containerd is the CRI-native runtime current orchestrators expect",
        ),
        system(
            "Docker",
            "runtime",
            Lit(True),
            "Docker still works through a CRI shim but adds configuration steps",
        ),
        system(
            "CRI-O",
            "runtime",
            SystemDeployed("Kubernetes"),
            "CRI-O exists solely for Kubernetes clusters",
        ),
        system(
            "Kubernetes",
            "orchestrator",
            Lit(True),
            "Kubernetes orchestrates any CRI-compliant runtime",
        ),
        system(
            "Knative",
            "orchestrator",
            Lit(True),
            "Knative layers a serverless control loop over a managed cluster",
        ),
        system(
            "DockerSwarm",
            "orchestrator",
            SystemDeployed("Docker"),
            "Swarm mode ships inside the Docker engine and requires it",
        ),
        system(
            "HPA",
            "autoscaler",
            Or((SystemDeployed("Kubernetes"), SystemDeployed("Knative"))),
            "The horizontal pod autoscaler needs a compatible orchestrator: "
            "Kubernetes or Knative both qualify",
        ),
        system(
            "KEDA",
            "autoscaler",
            SystemDeployed("Kubernetes"),
            "KEDA scales on event sources and drives Kubernetes objects",
        ),
        system(
            "Istio-sidecar",
            "mesh",
            And(
                (
                    SystemDeployed("Kubernetes"),
                    Allocate("cores", Lit(1), Scope.PER_DEVICE, "NODE"),
                )
            ),
            "Sidecar proxies cost a core on every node and need Kubernetes",
        ),
        system(
            "Istio-ambient",
            "mesh",
            And(
                (
                    SystemDeployed("Kubernetes"),
                    Allocate("cores", Lit(1), Scope.PER_WORKLOAD_GLOBAL, "NODE"),
                )
            ),
            "Ambient mode moves proxying to shared node agents on Kubernetes",
        ),
        system(
            "Linkerd",
            "mesh",
            And(
                (
                    SystemDeployed("Kubernetes"),
                    Allocate("cores", Lit(2), Scope.PER_WORKLOAD_GLOBAL, "NODE"),
                )
            ),
            "Linkerd's micro-proxies stay lightweight but require Kubernetes",
        ),
        system(
            "Cilium",
            "mesh",
            And(
                (
                    SystemDeployed("Kubernetes"),
                    forall("NODE", "n", battr("n", "kernel_ebpf")),
                )
            ),
            "Cilium's mesh runs in eBPF and needs kernels that support it",
        ),
        system("gRPC", "rpc", Lit(True), "gRPC is the default microservice RPC layer"),
        system(
            "Thrift",
            "rpc",
            Lit(True),
            "Thrift needs IDL regeneration tooling wired into every service",
        ),
    ]:
        systems[s.id] = s

    orderings = (
        better("ease_of_deployment", "containerd", "Docker"),
        better("ease_of_deployment", "Docker", "CRI-O"),
        better("ease_of_deployment", "DockerSwarm", "Kubernetes"),
        better("ease_of_deployment", "Kubernetes", "Knative"),
        better("ease_of_deployment", "HPA", "KEDA"),
        better("ease_of_deployment", "Linkerd", "Istio-sidecar"),
        better("ease_of_deployment", "Istio-sidecar", "Istio-ambient"),
        better("ease_of_deployment", "Linkerd", "Cilium"),
        better("ease_of_deployment", "gRPC", "Thrift"),
        better("latency", "Istio-ambient", "Linkerd"),
        better("latency", "Linkerd", "Istio-sidecar"),
        better("latency", "Cilium", "Istio-sidecar"),
        better("latency", "gRPC", "Thrift"),
        better("scalability", "Kubernetes", "DockerSwarm"),
        better("scalability", "KEDA", "HPA"),
    )

    return Catalog(schemas, hardware, objectives, roles, systems, orderings)


# --------------------------------------------------------------------------
# topologies and queries
# --------------------------------------------------------------------------


def dc_topology() -> DeviceGroup:
    def rack(idx: int) -> DeviceGroup:
        rid = f"pod1.rack{idx}"
        devices = [
            DeviceSlot(f"{rid}.compute{i}", "COMPUTE", "dc.compute") for i in range(7)
        ]
        devices.append(DeviceSlot(f"{rid}.tor", "SWITCH", "dc.switch"))
        devices.extend(
            DeviceSlot(f"{rid}.link{i}", "LINK", "dc.link") for i in range(7)
        )
        return DeviceGroup(rid, "RACK", (), tuple(devices))

    return DeviceGroup(
        "pod1",
        "POD",
        (rack(0), rack(1)),
        (DeviceSlot("pod1.router0", "ROUTER", "dc.router"),),
    )


def ml_training_query() -> Query:
    workload = WorkloadSpec(
        id="ML_Training",
        deployed_at=("pod1.rack0",),
        properties=("dc_flows", "long_flows", "incast"),
        objectives=(
            "latency",
            "throughput",
            "ease_of_deployment",
            "monitoring",
            "load_balancing",
        ),
        scalars={
            "peak_cores": 280,
            "average_cores": 120,
            "peak_bandwidth": 20,
            "average_bandwidth": 10,
            "network_load": 9,
        },
        performance_bounds=(PerformanceBound("load_balancing", "PLB"),),
    )
    return Query(
        topology=dc_topology(),
        workloads=(workload,),
        optimize=(
            OptimizeDirective(priority=1, workload="ML_Training", objective="latency"),
            OptimizeDirective(priority=2, workload="ML_Training", objective="throughput"),
            OptimizeDirective(
                priority=3, workload="ML_Training", objective="ease_of_deployment"
            ),
        ),
    )


def inference_query(exclude_programmable: bool) -> Query:
    workload = WorkloadSpec(
        id="Inference",
        deployed_at=("pod1.rack0",),
        properties=("dc_flows", "short_flows", "high_priority", "ml_inference"),
        objectives=(
            "latency",
            "throughput",
            "monitoring.detect_queue_length",
            "load_balancing",
        ),
        scalars={
            "peak_cores": 350,
            "average_cores": 100,
            "peak_bandwidth": 25,
            "average_bandwidth": 8,
            "network_load": 30,
            "num_flows": 10,
        },
        performance_bounds=(PerformanceBound("load_balancing", "PacketSpray"),),
        exempted_roles=("virtual_switch",),
    )
    return Query(
        topology=dc_topology(),
        workloads=(workload,),
        optimize=(
            OptimizeDirective(priority=1, workload="Inference", objective="latency"),
            OptimizeDirective(priority=2, workload="Inference", objective="throughput"),
            OptimizeDirective(priority=3, total_cost=True),
            OptimizeDirective(priority=4, workload="Inference", objective="monitoring"),
        ),
        excluded_hardware=("tofino1", "tofino_router") if exclude_programmable else (),
    )


def cloud_query(priority_order: tuple[str, str]) -> Query:
    topology = DeviceGroup(
        "cluster0",
        "CLUSTER",
        (),
        tuple(DeviceSlot(f"cluster0.node{i}", "NODE", "cloud.node") for i in range(4)),
    )
    workload = WorkloadSpec(
        id="HotelReservation",
        deployed_at=("cluster0",),
        properties=("microservices", "rpc_calls"),
        objectives=("latency", "ease_of_deployment"),
        scalars={"peak_cores": 12, "average_cores": 6},
    )
    return Query(
        topology=topology,
        workloads=(workload,),
        optimize=tuple(
            OptimizeDirective(priority=i + 1, workload="HotelReservation", objective=obj)
            for i, obj in enumerate(priority_order)
        ),
    )


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    dc = dc_catalog()
    cloud = cloud_catalog()
    for catalog, name in ((dc, "catalog_dc"), (cloud, "catalog_cloud")):
        report = validate_catalog(catalog)
        if not report.ok:
            for v in report.sorted():
                print(f"  {v}")
            raise SystemExit(f"{name} failed validation")
        write_document(DATA / f"{name}.catalog.json", catalog_to_json(catalog))

    write_document(DATA / "ml_training.query.json", query_to_json(ml_training_query()))
    write_document(DATA / "inference.query.json", query_to_json(inference_query(False)))
    write_document(
        DATA / "inference_no_prog.query.json", query_to_json(inference_query(True))
    )
    write_document(
        DATA / "cloud_eod.query.json",
        query_to_json(cloud_query(("ease_of_deployment", "latency"))),
    )
    write_document(
        DATA / "cloud_latency.query.json",
        query_to_json(cloud_query(("latency", "ease_of_deployment"))),
    )
    print(f"regenerated bundled data under {DATA}")


if __name__ == "__main__":
    main()
